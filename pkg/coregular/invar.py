"""
Invariant spaces and graded ideals of k[V]^G, all by per-degree linear algebra.

Every ideal here is a list of slices: slice d is a Subspace of k[V]_d in
monomial coordinates (see polyact.monomials). Minimal generator counts come
from graded Nakayama: at each degree, the candidates that are independent
modulo what lower-degree generators already produce.

All verdicts are complete only up to their degree bound, which every result
carries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from coregular import gfcore
from coregular.gfcore import ConsistencyFault, Subspace
from coregular.matrixgroup import Decomposition, Group, fixed_space
from coregular.polyact import (
    GradedBasis,
    Polynomial,
    act,
    degree_action_matrix,
    from_vector,
    is_invariant,
    monomials,
    multiplication_matrix,
    space_dim,
    substitution_matrix,
    times_variables,
    to_vector,
)


def resolve_degree_bound(order, n, explicit=None, cap=None) -> int:
    """Explicit bound wins; otherwise max(|G|, n(|G|-1)) clamped to `cap`."""
    if explicit is not None:
        if int(explicit) < 1:
            raise ValueError(f"degree bound must be at least 1, got {explicit}")
        return int(explicit)
    bound = max(order, n * (order - 1), 1)
    return min(bound, cap) if cap else bound


# ── Invariant spaces ─────────────────────────────────────────────────────────

def invariant_basis(group: Group, d) -> GradedBasis:
    """k[V]^G_d as the common kernel of (M_sigma - 1) over the generators."""
    n, p = group.n, group.p
    dim = space_dim(n, d)
    if dim == 0:
        return GradedBasis(d, n, p, Subspace.zero(0, p))
    one = np.eye(dim, dtype=np.int64)
    blocks = [(degree_action_matrix(g, d, p) - one) % p for g in group.generators]
    return GradedBasis(d, n, p, gfcore.kernel(gfcore.stack_rows(blocks, dim), p))


def brute_force_invariant_dim(group: Group, d) -> int:
    """Oracle: fixed space over every element, columns built from `act`."""
    n, p = group.n, group.p
    basis = monomials(n, d)
    if not basis:
        return 0
    blocks = []
    for element, inverse in zip(group.elements, group.inverses):
        columns = [to_vector(act(element, Polynomial.monomial(m, p), inverse), d) for m in basis]
        matrix = np.array(columns, dtype=np.int64).T
        blocks.append((matrix - np.eye(len(basis), dtype=np.int64)) % p)
    return gfcore.kernel(gfcore.stack_rows(blocks, len(basis)), p).dim


class InvariantTable:
    """Lazily computed k[V]^G_d for d = 0..degree_bound."""

    def __init__(self, group: Group, degree_bound: int):
        self.group = group
        self.degree_bound = int(degree_bound)
        self._bases: dict = {}

    def __getitem__(self, d) -> GradedBasis:
        if d not in self._bases:
            self._bases[d] = invariant_basis(self.group, d)
        return self._bases[d]

    def dim(self, d) -> int:
        return self[d].dim

    def series(self, bound=None) -> tuple:
        bound = self.degree_bound if bound is None else bound
        return tuple(self.dim(d) for d in range(bound + 1))

    @property
    def hilbert_series(self) -> tuple:
        return self.series()


# ── Graded ideals ────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class IdealProfile:
    generators: tuple
    generator_degrees: tuple
    per_degree_dims: tuple
    degree_bound: int
    expected_codim: Optional[int] = None

    @property
    def min_generators(self) -> int:
        return len(self.generators)

    @property
    def is_complete_intersection(self) -> bool:
        return self.expected_codim is not None and self.min_generators == self.expected_codim

    def as_dict(self) -> dict:
        return {
            "generators": [str(g) for g in self.generators],
            "generator_degrees": list(self.generator_degrees),
            "min_generators": self.min_generators,
            "expected_codim": self.expected_codim,
            "is_complete_intersection": self.is_complete_intersection,
            "per_degree_dims": list(self.per_degree_dims),
            "degree_bound": self.degree_bound,
        }


@dataclass(frozen=True, eq=False)
class _Extension:
    slices: tuple
    chosen: tuple  # (degree, coordinate row)


def _extend(candidates: dict, n, p, bound) -> _Extension:
    """Slices of the k[V]-ideal generated by candidate rows, plus a minimal subset."""
    slices = [Subspace.zero(1, p)]
    chosen = []
    for d in range(1, bound + 1):
        width = space_dim(n, d)
        prev = slices[-1]
        if prev.dim and prev.dim == prev.ambient_dim:
            base = Subspace.full(width, p)
        else:
            base = Subspace.span(times_variables(prev.basis, n, d - 1, p), width, p)
        rows = candidates.get(d)
        picked = gfcore.independent_rows(rows, p, base) if rows is not None and len(rows) else []
        if picked:
            rows = np.asarray(rows, dtype=np.int64)
            chosen.extend((d, rows[i]) for i in picked)
            base = base + Subspace.span(rows[picked], width, p)
        slices.append(base)
    return _Extension(tuple(slices), tuple(chosen))


def _profile(ext: _Extension, n, p, bound, expected_codim) -> IdealProfile:
    gens = tuple(from_vector(row, n, d, p) for d, row in ext.chosen)
    return IdealProfile(
        generators=gens,
        generator_degrees=tuple(d for d, _ in ext.chosen),
        per_degree_dims=tuple(s.dim for s in ext.slices),
        degree_bound=bound,
        expected_codim=expected_codim,
    )


def extend_ideal(polys: Sequence[Polynomial], n, p, bound) -> _Extension:
    """k[V]-ideal generated by homogeneous polynomials, slice by slice."""
    candidates: dict = {}
    for f in polys:
        if f.is_zero:
            continue
        if not f.is_homogeneous:
            raise ValueError(f"ideal generators must be homogeneous, got {f}")
        if f.degree == 0:
            raise ValueError("ideal generators must have positive degree")
        candidates.setdefault(f.degree, []).append(to_vector(f, f.degree))
    return _extend({d: np.array(rows) for d, rows in candidates.items()}, n, p, bound)


def hilbert_ideal(group: Group, bound, table: Optional[InvariantTable] = None) -> IdealProfile:
    table = table or InvariantTable(group, bound)
    candidates = {d: table[d].space.basis for d in range(1, bound + 1)}
    ext = _extend(candidates, group.n, group.p, bound)
    return _profile(ext, group.n, group.p, bound, expected_codim=group.n)


def vanishing_ideal(subspace: Subspace, bound) -> _Extension:
    """I(U): the k[V]-ideal generated by the linear forms vanishing on U."""
    n, p = subspace.ambient_dim, subspace.p
    forms = subspace.perp().basis
    return _extend({1: forms} if len(forms) else {}, n, p, bound)


def relative_hilbert_ideal(
    group: Group, subspace: Subspace, bound, table: Optional[InvariantTable] = None
) -> IdealProfile:
    """Ideal of k[V] generated by the invariants lying in I(U), for U inside V^G."""
    if not fixed_space(group).contains_subspace(subspace):
        raise ValueError(f"U (dim {subspace.dim}) is not contained in V^G")
    table = table or InvariantTable(group, bound)
    vanishing = vanishing_ideal(subspace, bound)
    candidates = {}
    for d in range(1, bound + 1):
        inside = table[d].space.intersection(vanishing.slices[d])
        if inside.dim:
            candidates[d] = inside.basis
    ext = _extend(candidates, group.n, group.p, bound)
    return _profile(ext, group.n, group.p, bound, expected_codim=subspace.codim)


# ── Ideals and subalgebras of k[V]^G ─────────────────────────────────────────

def _nakayama_over_invariants(slices: dict, table: InvariantTable, bound, extra_base: Optional[dict] = None) -> list:
    """Minimal generators of an ideal of k[V]^G given by its slices.

    Decomposables in degree d are g * Inv_{d - deg g} over the generators
    already chosen; `extra_base` adds further rows to quotient out.
    """
    group = table.group
    n, p = group.n, group.p
    chosen = []
    for d in range(1, bound + 1):
        space = slices.get(d)
        if space is None or not space.dim:
            continue
        width = space_dim(n, d)
        blocks = []
        for g in chosen:
            inv = table[d - g.degree]
            if inv.dim:
                blocks.append((multiplication_matrix(g, d - g.degree) @ inv.space.basis.T % p).T)
        if extra_base and d in extra_base:
            blocks.append(extra_base[d].basis)
        base = Subspace.span(gfcore.stack_rows(blocks, width), width, p)
        for i in gfcore.independent_rows(space.basis, p, base):
            chosen.append(from_vector(space.basis[i], n, d, p))
    return chosen


def _invariant_ideal_slices(generators: Sequence[Polynomial], table: InvariantTable, bound) -> dict:
    """Slices of the ideal of k[V]^G generated by invariants: sum of g * Inv_{d - deg g}."""
    n, p = table.group.n, table.group.p
    slices = {}
    for d in range(1, bound + 1):
        width = space_dim(n, d)
        blocks = []
        for g in generators:
            if g.is_zero or g.degree > d:
                continue
            inv = table[d - g.degree]
            if inv.dim:
                blocks.append((multiplication_matrix(g, d - g.degree) @ inv.space.basis.T % p).T)
        slices[d] = Subspace.span(gfcore.stack_rows(blocks, width), width, p)
    return slices


def algebra_generators(group: Group, bound, table: Optional[InvariantTable] = None) -> list:
    """Minimal homogeneous generators of k[V]^G up to `bound`, as (degree, f)."""
    table = table or InvariantTable(group, bound)
    n, p = group.n, group.p
    chosen: list = []
    for d in range(1, bound + 1):
        inv = table[d]
        if not inv.dim:
            continue
        width = space_dim(n, d)
        blocks = []
        for e, g in chosen:
            lower = table[d - e]
            if lower.dim:
                blocks.append((multiplication_matrix(g, d - e) @ lower.space.basis.T % p).T)
        base = Subspace.span(gfcore.stack_rows(blocks, width), width, p)
        for i in gfcore.independent_rows(inv.space.basis, p, base):
            chosen.append((d, from_vector(inv.space.basis[i], n, d, p)))
    return chosen


def subalgebra_dims(polys: Sequence[Polynomial], n, p, bound) -> tuple:
    """dim of the degree-d part of k[f_1, ..., f_k] for d = 0..bound."""
    for f in polys:
        if f.is_zero or not f.is_homogeneous or f.degree < 1:
            raise ValueError(f"subalgebra generators must be homogeneous of positive degree, got {f}")
    parts = [Subspace.full(1, p)]
    for d in range(1, bound + 1):
        width = space_dim(n, d)
        blocks = []
        for f in polys:
            if f.degree <= d and parts[d - f.degree].dim:
                lower = parts[d - f.degree]
                blocks.append((multiplication_matrix(f, d - f.degree) @ lower.basis.T % p).T)
        parts.append(Subspace.span(gfcore.stack_rows(blocks, width), width, p))
    return tuple(s.dim for s in parts)


def is_hsop(polys: Sequence[Polynomial], n, p) -> bool:
    """n homogeneous polynomials whose ideal contains all of k[V]_t, t = sum(d_i - 1) + 1."""
    if len(polys) != n:
        return False
    if any(f.is_zero or not f.is_homogeneous or f.degree < 1 for f in polys):
        return False
    if n == 0:
        return True
    top = sum(f.degree - 1 for f in polys) + 1
    ext = extend_ideal(polys, n, p, top)
    return ext.slices[top].dim == space_dim(n, top)


@dataclass(frozen=True, eq=False)
class ContractionResult:
    j_dims: tuple
    jec_dims: tuple
    new_generators: tuple
    profile: IdealProfile

    @property
    def equal(self) -> bool:
        return self.j_dims == self.jec_dims

    @property
    def first_strict_degree(self) -> Optional[int]:
        for d, (a, b) in enumerate(zip(self.j_dims, self.jec_dims)):
            if a != b:
                return d
        return None

    def as_dict(self) -> dict:
        return {
            "equal": self.equal,
            "first_strict_degree": self.first_strict_degree,
            "j_dims": list(self.j_dims),
            "jec_dims": list(self.jec_dims),
            "new_generators": [str(g) for g in self.new_generators],
            "degree_bound": self.profile.degree_bound,
        }


def contract_extend(
    group: Group, generators: Sequence[Polynomial], bound, table: Optional[InvariantTable] = None
) -> ContractionResult:
    """Compare J with J^{ec} = (J k[V]) cap k[V]^G slice by slice."""
    for g in generators:
        if not is_invariant(group, g):
            raise ValueError(f"ideal generator {g} is not invariant")
    table = table or InvariantTable(group, bound)
    n, p = group.n, group.p
    j_slices = _invariant_ideal_slices(generators, table, bound)
    extended = extend_ideal(generators, n, p, bound)
    jec_slices = {d: table[d].space.intersection(extended.slices[d]) for d in range(1, bound + 1)}
    for d in range(1, bound + 1):
        if not jec_slices[d].contains_subspace(j_slices[d]):
            raise ConsistencyFault(f"J is not contained in J^ec in degree {d}")

    minimal = _nakayama_over_invariants(jec_slices, table, bound)
    new = _nakayama_over_invariants(jec_slices, table, bound, extra_base=j_slices)
    profile = IdealProfile(
        generators=tuple(minimal),
        generator_degrees=tuple(g.degree for g in minimal),
        per_degree_dims=(0,) + tuple(jec_slices[d].dim for d in range(1, bound + 1)),
        degree_bound=bound,
    )
    return ContractionResult(
        j_dims=(0,) + tuple(j_slices[d].dim for d in range(1, bound + 1)),
        jec_dims=profile.per_degree_dims,
        new_generators=tuple(new),
        profile=profile,
    )


def invariant_ideal_generators(slices: dict, table: InvariantTable, bound) -> list:
    return _nakayama_over_invariants(slices, table, bound)


# ── Coregularity ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class CoregularityVerdict:
    verdict: str
    route: str
    degree_bound: int
    certificate: Optional[tuple] = None
    failure_witness: Optional[str] = None

    @property
    def is_coregular(self) -> bool:
        return self.verdict == "coregular"

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "route": self.route,
            "certificate_degrees": list(self.certificate) if self.certificate else None,
            "failure_witness": self.failure_witness,
            "degree_bound": self.degree_bound,
        }


def polynomial_certificate(group: Group, generators: Sequence) -> Optional[tuple]:
    """Degrees of n generators forming an h.s.o.p. with product |G|, else None."""
    polys = [g for _, g in generators]
    degrees = tuple(d for d, _ in generators)
    if len(polys) != group.n or math.prod(degrees) != group.order:
        return None
    return degrees if is_hsop(polys, group.n, group.p) else None


def decide_coregular(
    group: Group,
    bound,
    dsp,
    table: Optional[InvariantTable] = None,
    hilb: Optional[IdealProfile] = None,
    generators: Optional[list] = None,
) -> CoregularityVerdict:
    """Hilbert ideal CI and DSP decide; n-generator certificates must agree."""
    table = table or InvariantTable(group, bound)
    hilb = hilb or hilbert_ideal(group, bound, table)
    generators = generators if generators is not None else algebra_generators(group, bound, table)

    ci, holds = hilb.is_complete_intersection, bool(dsp.holds)
    coregular = ci and holds
    certificate = polynomial_certificate(group, generators)
    too_many = len(generators) > group.n

    if coregular and certificate is None:
        raise ConsistencyFault(
            f"Hilbert ideal is a complete intersection and DSP holds, but no polynomial certificate "
            f"was found among generators of degrees {[d for d, _ in generators]} (|G| = {group.order}, "
            f"degree bound {bound}); a larger degree bound may be needed"
        )
    if not coregular and certificate is not None:
        raise ConsistencyFault(
            f"generators of degrees {list(certificate)} certify a polynomial ring but "
            f"Hilb CI = {ci}, DSP = {holds} (degree bound {bound})"
        )
    if coregular and too_many:
        raise ConsistencyFault(f"coregular verdict with {len(generators)} > n algebra generators")

    if coregular:
        return CoregularityVerdict("coregular", "hilbert_ci_and_dsp", bound, certificate=certificate)
    if not ci and not holds:
        witness = "hilbert_ideal_and_dsp"
    elif not holds:
        witness = "dsp"
    else:
        witness = "hilbert_ideal"
    return CoregularityVerdict("not_coregular", "hilbert_ci_and_dsp", bound, failure_witness=witness)


# ── Hilbert series ───────────────────────────────────────────────────────────

def _eigenvalues(matrix, p) -> list:
    """Eigenvalues in GF(p) with multiplicity; fails unless diagonalizable over GF(p)."""
    n = matrix.shape[0]
    out = []
    for c in range(1, p):
        shifted = (np.asarray(matrix, dtype=np.int64) - c * np.eye(n, dtype=np.int64)) % p
        out.extend([c] * (n - gfcore.rank(shifted, p)))
    if len(out) != n:
        raise ValueError(f"{matrix.tolist()} is not diagonalizable over GF({p})")
    return out


def _lift_modulus(m, limit) -> int:
    """Smallest prime q = 1 mod m above `limit`; GF(q) then holds the m-th roots of unity."""
    q = m * (limit // m + 1) + 1
    while not gfcore.is_prime(q):
        q += m
    return q


def molien_series(group: Group, bound) -> tuple:
    """Hilbert series of a non-modular diagonalizable group by averaging 1/det(1 - t sigma).

    Eigenvalues are lifted through a primitive root of GF(p) to (p-1)-th roots of
    unity, taken in GF(q) for a prime q above every possible sum, so the average is
    computed exactly in integers.
    """
    if not group.is_non_modular:
        raise ValueError(f"Molien series needs p not dividing |G| = {group.order}")
    p = group.p
    m = p - 1
    root = gfcore.primitive_root(p)
    log = {pow(root, k, p): k for k in range(m)}
    q = _lift_modulus(m, group.order * space_dim(group.n, bound))
    omega = pow(gfcore.primitive_root(q), (q - 1) // m, q)
    total = np.zeros(bound + 1, dtype=object)
    for element in group.elements:
        series = np.zeros(bound + 1, dtype=object)
        series[0] = 1
        for c in _eigenvalues(element, p):
            step = pow(omega, log[c], q)
            geometric = np.array([pow(step, k, q) for k in range(bound + 1)], dtype=object)
            series = np.convolve(series, geometric)[: bound + 1] % q
        total = (total + series) % q
    scale = pow(group.order, -1, q)
    return tuple(int(v * scale % q) for v in total)


def _series_product(a, b, bound) -> tuple:
    return tuple(int(v) for v in np.convolve(np.asarray(a, dtype=object), np.asarray(b, dtype=object))[: bound + 1])


@dataclass(frozen=True)
class SeriesCheck:
    series_G: tuple
    series_T: tuple
    series_D: tuple
    product: tuple
    molien_D: Optional[tuple]
    first_failing_degree: Optional[int]
    degree_bound: int

    @property
    def holds(self) -> bool:
        return self.first_failing_degree is None and self.molien_matches is not False

    @property
    def molien_matches(self) -> Optional[bool]:
        return None if self.molien_D is None else self.molien_D == self.series_D

    def as_dict(self) -> dict:
        return {
            "series_G": list(self.series_G),
            "series_T_on_fixed": list(self.series_T),
            "series_D_on_moved": list(self.series_D),
            "product": list(self.product),
            "molien_D": list(self.molien_D) if self.molien_D is not None else None,
            "molien_matches": self.molien_matches,
            "first_failing_degree": self.first_failing_degree,
            "holds": self.holds,
            "degree_bound": self.degree_bound,
        }


def factor_series(group: Group, bound) -> tuple:
    if group.n == 0:
        return (1,) + (0,) * bound
    return InvariantTable(group, bound).series()


def hilbert_series_checks(
    group: Group, dec: Decomposition, bound, table: Optional[InvariantTable] = None
) -> SeriesCheck:
    """Hilbert series of G against the product of T on V^D and D on V_D."""
    table = table or InvariantTable(group, bound)
    series_g = table.series(bound)
    t_fixed, d_moved = dec.T_on_fixed(), dec.D_on_moved()
    series_t = factor_series(t_fixed, bound)
    series_d = factor_series(d_moved, bound)
    product = _series_product(series_t, series_d, bound)
    failing = next((d for d in range(bound + 1) if series_g[d] != product[d]), None)
    molien = molien_series(d_moved, bound) if d_moved.n else None
    return SeriesCheck(series_g, series_t, series_d, product, molien, failing, bound)


# ── Restriction to a fixed subspace ──────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class RestrictionProfile:
    subspace_dim: int
    image_dims: tuple
    generators: tuple
    expected_dims: tuple
    degree_bound: int

    @property
    def generator_degrees(self) -> tuple:
        return tuple(g.degree for g in self.generators)

    @property
    def is_polynomial(self) -> bool:
        return len(self.generators) == self.subspace_dim and self.image_dims == self.expected_dims

    def as_dict(self) -> dict:
        return {
            "subspace_dim": self.subspace_dim,
            "generators": [str(g) for g in self.generators],
            "generator_degrees": list(self.generator_degrees),
            "image_dims": list(self.image_dims),
            "is_polynomial": self.is_polynomial,
            "degree_bound": self.degree_bound,
        }


def _free_series(degrees, bound) -> tuple:
    series = (1,) + (0,) * bound
    for e in degrees:
        factor = tuple(1 if k % e == 0 else 0 for k in range(bound + 1))
        series = _series_product(series, factor, bound)
    return series


def restriction_profile(
    group: Group, subspace: Subspace, bound, table: Optional[InvariantTable] = None
) -> RestrictionProfile:
    """Image of k[V]^G -> k[U]; its kernel is I(U)^c, the image should be free on dim U generators."""
    if not fixed_space(group).contains_subspace(subspace):
        raise ValueError(f"U (dim {subspace.dim}) is not contained in V^G")
    table = table or InvariantTable(group, bound)
    r, p = subspace.dim, group.p
    if r == 0:
        dims = (1,) + (0,) * bound
        return RestrictionProfile(0, dims, (), dims, bound)
    images = subspace.basis.T
    parts = [Subspace.full(1, p)]
    for d in range(1, bound + 1):
        inv = table[d]
        width = space_dim(r, d)
        rows = (substitution_matrix(images, d, p) @ inv.space.basis.T % p).T if inv.dim else np.zeros((0, width))
        parts.append(Subspace.span(rows, width, p))

    chosen: list = []
    for d in range(1, bound + 1):
        width = space_dim(r, d)
        blocks = []
        for g in chosen:
            lower = parts[d - g.degree]
            if lower.dim:
                blocks.append((multiplication_matrix(g, d - g.degree) @ lower.basis.T % p).T)
        base = Subspace.span(gfcore.stack_rows(blocks, width), width, p)
        for i in gfcore.independent_rows(parts[d].basis, p, base):
            chosen.append(from_vector(parts[d].basis[i], r, d, p))
    dims = tuple(s.dim for s in parts)
    return RestrictionProfile(r, dims, tuple(chosen), _free_series([g.degree for g in chosen], bound), bound)
