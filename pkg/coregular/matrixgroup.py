"""
Finite matrix groups over GF(p): closure, pseudo-reflection classification,
hyperplane data and the split G = T x D of an abelian reflection group.

Convention: matrices act on column vectors, and on linear forms by
(sigma . x)(v) = x(sigma^{-1} v). As a row vector, sigma . x = x @ sigma^{-1}.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Optional, Sequence

import numpy as np

from coregular import gfcore
from coregular.gfcore import ConsistencyFault, Subspace

DEFAULT_ELEMENT_CAP = 10**6


class ElementCapError(ValueError):
    """Group closure grew past the configured element cap."""


# ── Groups ───────────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class Group:
    p: int
    n: int
    generators: tuple
    elements: tuple
    is_abelian: bool
    is_p_group: bool
    index: Mapping[bytes, int] = field(repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def is_non_modular(self) -> bool:
        return self.order % self.p != 0

    @property
    def identity(self) -> np.ndarray:
        return self.elements[0]

    def contains(self, matrix) -> bool:
        return gfcore.matrix_key(matrix) in self.index

    def index_of(self, matrix) -> int:
        try:
            return self.index[gfcore.matrix_key(matrix)]
        except KeyError:
            raise ValueError("matrix is not an element of the group") from None

    @cached_property
    def keys(self) -> frozenset:
        return frozenset(self.index)

    @cached_property
    def inverses(self) -> tuple:
        return tuple(gfcore.inverse(m, self.p) for m in self.elements)

    def __repr__(self):
        return f"Group(p={self.p}, n={self.n}, order={self.order}, abelian={self.is_abelian})"


def _is_p_power(order, p) -> bool:
    while order % p == 0:
        order //= p
    return order == 1


def close_group(p, n, generators: Sequence, element_cap: Optional[int] = None) -> Group:
    """Breadth-first closure of the generators under multiplication."""
    gfcore.check_modulus(p)
    cap = DEFAULT_ELEMENT_CAP if element_cap is None else int(element_cap)
    gens = []
    for i, g in enumerate(generators):
        mat = gfcore.as_matrix(np.asarray(g).tolist(), p)
        if mat.shape != (n, n):
            raise ValueError(f"generator {i} has shape {mat.shape}, expected ({n}, {n})")
        if not gfcore.is_invertible(mat, p):
            raise ValueError(f"generator {i} is singular mod {p}")
        gens.append(mat)

    one = gfcore.identity(n, p)
    elements = [one]
    index = {gfcore.matrix_key(one): 0}
    queue = deque([one])
    while queue:
        current = queue.popleft()
        for g in gens:
            product = gfcore.mat_mul(current, g, p)
            key = gfcore.matrix_key(product)
            if key in index:
                continue
            if len(elements) >= cap:
                raise ElementCapError(f"group closure exceeds the element cap of {cap}")
            index[key] = len(elements)
            elements.append(product)
            queue.append(product)

    abelian = all(
        np.array_equal(gfcore.mat_mul(a, b, p), gfcore.mat_mul(b, a, p))
        for i, a in enumerate(gens)
        for b in gens[i + 1:]
    )
    return Group(
        p=p,
        n=n,
        generators=tuple(gens),
        elements=tuple(elements),
        is_abelian=abelian,
        is_p_group=_is_p_power(len(elements), p),
        index=index,
    )


def subgroup(group: Group, generators: Sequence) -> Group:
    return close_group(group.p, group.n, list(generators), element_cap=max(group.order, 1))


# ── Pseudo-reflections ───────────────────────────────────────────────────────

class ElementKind(str, enum.Enum):
    IDENTITY = "identity"
    TRANSVECTION = "transvection"
    HOMOLOGY = "homology"
    NON_REFLECTION = "non_reflection"


@dataclass(frozen=True, eq=False)
class ReflectionInfo:
    """sigma(v) - v = x_rho(v) * e_rho, x_rho normalized to leading coefficient 1."""

    kind: ElementKind
    matrix: np.ndarray
    e_rho: np.ndarray
    x_rho: np.ndarray
    hyperplane: Subspace
    eigenvalue: Optional[int]
    p: int

    @property
    def form_key(self) -> tuple:
        return tuple(int(c) for c in self.x_rho)


@dataclass(frozen=True, eq=False)
class Classification:
    kind: ElementKind
    reflection: Optional[ReflectionInfo] = None


def normalize_form(form, p) -> np.ndarray:
    """Scale a nonzero covector so that its first nonzero coefficient is 1."""
    vec = np.asarray(form, dtype=np.int64) % p
    nz = np.nonzero(vec)[0]
    if nz.size == 0:
        raise ValueError("the zero form does not define a hyperplane")
    return gfcore.as_vector((vec * pow(int(vec[nz[0]]), -1, p)) % p, p)


def classify_element(sigma, p) -> Classification:
    mat = np.asarray(sigma, dtype=np.int64) % p
    n = mat.shape[0]
    diff = (mat - np.eye(n, dtype=np.int64)) % p
    r = gfcore.rank(diff, p)
    if r == 0:
        return Classification(ElementKind.IDENTITY)
    if r != 1:
        return Classification(ElementKind.NON_REFLECTION)

    # rank-one factorization diff = e x^T
    col = int(np.nonzero(diff.any(axis=0))[0][0])
    e = diff[:, col].copy()
    lead = int(np.nonzero(e)[0][0])
    x = (diff[lead] * pow(int(e[lead]), -1, p)) % p
    x_lead = int(x[np.nonzero(x)[0][0]])
    x = (x * pow(x_lead, -1, p)) % p
    e = (e * x_lead) % p
    if not np.array_equal(np.outer(e, x) % p, diff):
        raise ConsistencyFault(f"rank-one factorization failed for {mat.tolist()}")

    t = int(x @ e) % p
    if t == 0:
        kind, eigenvalue = ElementKind.TRANSVECTION, None
    else:
        eigenvalue = (1 + t) % p
        if eigenvalue == 0:
            raise ConsistencyFault(f"pseudo-reflection with eigenvalue 0: {mat.tolist()}")
        kind = ElementKind.HOMOLOGY
    info = ReflectionInfo(
        kind=kind,
        matrix=gfcore.as_matrix(mat.tolist(), p),
        e_rho=gfcore.as_vector(e, p),
        x_rho=gfcore.as_vector(x, p),
        hyperplane=gfcore.kernel(x.reshape(1, n), p),
        eigenvalue=eigenvalue,
        p=p,
    )
    return Classification(kind, info)


def reconstruct(info: ReflectionInfo) -> np.ndarray:
    n = info.e_rho.shape[0]
    return gfcore.as_matrix((np.eye(n, dtype=np.int64) + np.outer(info.e_rho, info.x_rho)).tolist(), info.p)


@dataclass(frozen=True, eq=False)
class ReflectionCensus:
    reflections: tuple
    is_reflection_group: bool
    T: Group
    D: Group

    @property
    def transvections(self) -> tuple:
        return tuple(r for r in self.reflections if r.kind is ElementKind.TRANSVECTION)

    @property
    def homologies(self) -> tuple:
        return tuple(r for r in self.reflections if r.kind is ElementKind.HOMOLOGY)

    @property
    def is_transvection_group(self) -> bool:
        return self.is_reflection_group and not self.homologies


def reflection_census(group: Group) -> ReflectionCensus:
    reflections = []
    for element in group.elements:
        info = classify_element(element, group.p).reflection
        if info is not None:
            if not np.array_equal(reconstruct(info), element):
                raise ConsistencyFault(f"reflection data does not rebuild {element.tolist()}")
            reflections.append(info)
    transvections = [r.matrix for r in reflections if r.kind is ElementKind.TRANSVECTION]
    homologies = [r.matrix for r in reflections if r.kind is ElementKind.HOMOLOGY]
    generated = subgroup(group, [r.matrix for r in reflections])
    return ReflectionCensus(
        reflections=tuple(reflections),
        is_reflection_group=generated.order == group.order,
        T=subgroup(group, transvections),
        D=subgroup(group, homologies),
    )


def list_reflections(n, p) -> list:
    """Every pseudo-reflection I + e x^T of GL_n(F_p), deterministic order."""
    gfcore.check_modulus(p)
    vectors = [np.array(v, dtype=np.int64) for v in np.ndindex(*([p] * n)) if any(v)]
    forms = [v for v in vectors if int(v[np.nonzero(v)[0][0]]) == 1]
    out = []
    for x in forms:
        for e in vectors:
            if (1 + int(x @ e)) % p == 0:
                continue
            out.append(gfcore.as_matrix((np.eye(n, dtype=np.int64) + np.outer(e, x)).tolist(), p))
    return out


# ── Characters and hyperplanes ───────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class Character:
    """Linear character: element key -> nonzero residue."""

    p: int
    values: Mapping[bytes, int] = field(repr=False)

    def __call__(self, matrix) -> int:
        try:
            return self.values[gfcore.matrix_key(matrix)]
        except KeyError:
            raise ValueError("character is not defined on this element") from None

    def __pow__(self, exponent):
        return Character(self.p, {k: pow(v, exponent, self.p) for k, v in self.values.items()})

    def __mul__(self, other: "Character"):
        missing = set(self.values) ^ set(other.values)
        if missing:
            raise ValueError("characters are defined on different element sets")
        return Character(self.p, {k: (v * other.values[k]) % self.p for k, v in self.values.items()})

    @property
    def is_trivial(self) -> bool:
        return all(v == 1 for v in self.values.values())

    def restrict(self, group: Group) -> "Character":
        return Character(self.p, {k: self.values[k] for k in group.index})


def trivial_character(group: Group) -> Character:
    return Character(group.p, {k: 1 for k in group.index})


def act_on_form(sigma_inverse, form, p) -> np.ndarray:
    return (np.asarray(form, dtype=np.int64) @ np.asarray(sigma_inverse, dtype=np.int64)) % p


def form_character(group: Group, form) -> Character:
    """chi with sigma . x = chi(sigma) x; fails if x is not semi-invariant."""
    x = normalize_form(form, group.p)
    lead = int(np.nonzero(x)[0][0])
    values = {}
    for element, element_inv in zip(group.elements, group.inverses):
        image = act_on_form(element_inv, x, group.p)
        c = int(image[lead])
        if not np.array_equal(image, (c * x) % group.p):
            raise ValueError(
                f"form {x.tolist()} is not semi-invariant under {element.tolist()}; "
                "hyperplane data needs an abelian group"
            )
        values[gfcore.matrix_key(element)] = c
    return Character(group.p, values)


@dataclass(frozen=True, eq=False)
class Hyperplane:
    form: np.ndarray
    kind: ElementKind
    stabilizer: Group
    character: Character

    @property
    def form_key(self) -> tuple:
        return tuple(int(c) for c in self.form)


def pointwise_stabilizer(group: Group, hyperplane: Subspace) -> Group:
    fixing = []
    for element in group.elements:
        moved = (np.asarray(element) @ hyperplane.basis.T - hyperplane.basis.T) % group.p
        if not moved.any():
            fixing.append(element)
    return subgroup(group, fixing)


def hyperplanes(group: Group, census: Optional[ReflectionCensus] = None) -> list:
    census = census or reflection_census(group)
    by_form = {}
    for info in census.reflections:
        by_form.setdefault(info.form_key, info)
    out = []
    for key in sorted(by_form, reverse=True):
        info = by_form[key]
        stabilizer = pointwise_stabilizer(group, info.hyperplane)
        for element in stabilizer.elements[1:]:
            cls = classify_element(element, group.p)
            if cls.reflection is None or cls.reflection.form_key != key:
                raise ConsistencyFault(f"stabilizer element {element.tolist()} is not a reflection in {key}")
        out.append(
            Hyperplane(
                form=info.x_rho,
                kind=info.kind,
                stabilizer=stabilizer,
                character=form_character(group, info.x_rho),
            )
        )
    return out


# ── T x D decomposition ─────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class Decomposition:
    T: Group
    D: Group
    V_fixed_D: Subspace
    V_moved_D: Subspace
    adapted_basis: np.ndarray

    @property
    def m(self) -> int:
        return self.V_fixed_D.dim

    @cached_property
    def dual_basis(self) -> np.ndarray:
        """Rows: coordinate forms y_1..y_m (vanish on V_D) then z_1.. (vanish on V^D)."""
        return gfcore.inverse(self.adapted_basis, self.T.p)

    def split(self, vector) -> tuple:
        coords = (self.dual_basis @ np.asarray(vector, dtype=np.int64)) % self.T.p
        fixed = (self.adapted_basis[:, : self.m] @ coords[: self.m]) % self.T.p
        moved = (self.adapted_basis[:, self.m:] @ coords[self.m:]) % self.T.p
        return fixed, moved

    def block_matrix(self, sigma, block: str) -> np.ndarray:
        p = self.T.p
        adapted = gfcore.mat_mul(gfcore.mat_mul(self.dual_basis, sigma, p), self.adapted_basis, p)
        if block == "fixed":
            return adapted[: self.m, : self.m]
        return adapted[self.m:, self.m:]

    def T_on_fixed(self) -> Group:
        return close_group(self.T.p, self.m, [self.block_matrix(t, "fixed") for t in self.T.generators])

    def D_on_moved(self) -> Group:
        n_moved = self.V_moved_D.dim
        return close_group(self.D.p, n_moved, [self.block_matrix(d, "moved") for d in self.D.generators])


def decompose(group: Group, census: Optional[ReflectionCensus] = None) -> Decomposition:
    if not group.is_abelian:
        raise ValueError("decompose needs an abelian group")
    census = census or reflection_census(group)
    if not census.is_reflection_group:
        raise ValueError("decompose needs a group generated by pseudo-reflections")
    p, n = group.p, group.n
    T, D = census.T, census.D

    one = np.eye(n, dtype=np.int64)
    fixed = gfcore.kernel(gfcore.stack_rows([(d - one) % p for d in D.elements], n), p)
    moved = Subspace.span(
        gfcore.stack_rows([((d - one) % p).T for d in D.elements], n), n, p
    )
    basis = gfcore.as_matrix(np.vstack([fixed.basis, moved.basis]).T.tolist(), p) if n else gfcore.identity(0, p)

    problems = []
    if T.keys & D.keys != {gfcore.matrix_key(group.identity)}:
        problems.append("T and D intersect nontrivially")
    if T.order * D.order != group.order:
        problems.append(f"|T|*|D| = {T.order}*{D.order} != |G| = {group.order}")
    if not T.is_p_group:
        problems.append(f"T has order {T.order}, not a power of {p}")
    if math.gcd(D.order, p) != 1:
        problems.append(f"D has order {D.order}, divisible by {p}")
    if fixed.dim + moved.dim != n or not (fixed + moved) == Subspace.full(n, p):
        problems.append(f"V^D (dim {fixed.dim}) and V_D (dim {moved.dim}) do not split V")
    for t in T.generators:
        if moved.dim and ((t @ moved.basis.T - moved.basis.T) % p).any():
            problems.append(f"transvection part {t.tolist()} moves V_D")
    for d in D.generators:
        if fixed.dim and ((d @ fixed.basis.T - fixed.basis.T) % p).any():
            problems.append(f"homology part {d.tolist()} moves V^D")
    if problems:
        raise ConsistencyFault("decomposition G = T x D failed: " + "; ".join(problems))
    return Decomposition(T=T, D=D, V_fixed_D=fixed, V_moved_D=moved, adapted_basis=basis)


def fixed_space(group: Group) -> Subspace:
    """V^G as the common kernel of (sigma - 1) over the generators."""
    one = np.eye(group.n, dtype=np.int64)
    return gfcore.kernel(gfcore.stack_rows([(g - one) % group.p for g in group.generators], group.n), group.p)
