"""
Sparse polynomials over GF(p) and the group action on them.

A Polynomial maps exponent tuples to nonzero residues. Terms are ordered
graded-lex, highest first, with x1 > x2 > ... > xn; that order drives both
rendering ("x1^2*x2 + 2*x3") and exact division.

Per-degree work goes through monomial coordinates: `monomials(n, d)` fixes
the basis of k[V]_d and `substitution_matrix` gives the matrix of a linear
change of variables on it. Group elements act by (sigma . f)(v) = f(sigma^{-1} v),
i.e. x_i is replaced by row i of sigma^{-1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from coregular import gfcore
from coregular.gfcore import ConsistencyFault, Subspace
from coregular.matrixgroup import Character, Group, ReflectionInfo


def _term_order(exponents: tuple) -> tuple:
    return (sum(exponents), exponents)


class Polynomial:
    """Immutable sparse polynomial in x1..x_{n_vars} over GF(p)."""

    __slots__ = ("n_vars", "p", "_terms")

    def __init__(self, n_vars: int, p: int, terms: Optional[Mapping] = None):
        self.n_vars = int(n_vars)
        self.p = int(p)
        clean = {}
        for exponents, coeff in (terms or {}).items():
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != self.n_vars or min(exponents, default=0) < 0:
                raise ValueError(f"bad exponent vector {exponents} for {self.n_vars} variables")
            c = (clean.get(exponents, 0) + int(coeff)) % self.p
            if c:
                clean[exponents] = c
            else:
                clean.pop(exponents, None)
        self._terms = clean

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, n_vars, p) -> "Polynomial":
        return cls(n_vars, p)

    @classmethod
    def constant(cls, n_vars, p, value=1) -> "Polynomial":
        return cls(n_vars, p, {(0,) * n_vars: value})

    @classmethod
    def variable(cls, n_vars, p, index) -> "Polynomial":
        """x_{index+1} (0-based index)."""
        if not 0 <= index < n_vars:
            raise ValueError(f"variable index {index} out of range for {n_vars} variables")
        exponents = [0] * n_vars
        exponents[index] = 1
        return cls(n_vars, p, {tuple(exponents): 1})

    @classmethod
    def monomial(cls, exponents, p, coeff=1) -> "Polynomial":
        return cls(len(exponents), p, {tuple(exponents): coeff})

    @classmethod
    def linear_form(cls, coeffs, p) -> "Polynomial":
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            exponents = [0] * n
            exponents[i] = 1
            terms[tuple(exponents)] = int(c)
        return cls(n, p, terms)

    # -- inspection -----------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def ordered_terms(self) -> list:
        return sorted(self._terms.items(), key=lambda item: _term_order(item[0]), reverse=True)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    @property
    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    @property
    def is_constant(self) -> bool:
        return self.degree <= 0

    def homogeneous_component(self, d) -> "Polynomial":
        return Polynomial(self.n_vars, self.p, {e: c for e, c in self._terms.items() if sum(e) == d})

    def homogeneous_components(self) -> dict:
        parts = {}
        for e, c in self._terms.items():
            parts.setdefault(sum(e), {})[e] = c
        return {d: Polynomial(self.n_vars, self.p, t) for d, t in sorted(parts.items())}

    def leading_term(self) -> tuple:
        if not self._terms:
            raise ValueError("the zero polynomial has no leading term")
        return self.ordered_terms()[0]

    def monic(self) -> "Polynomial":
        if not self._terms:
            return self
        return self * pow(self.leading_term()[1], -1, self.p)

    def uses_variables(self) -> set:
        return {i for e in self._terms for i, k in enumerate(e) if k}

    # -- arithmetic -----------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if other.n_vars != self.n_vars or other.p != self.p:
            raise ValueError(
                f"polynomial rings differ: GF({self.p})[{self.n_vars} vars] vs GF({other.p})[{other.n_vars} vars]"
            )

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, np.integer)):
            return Polynomial.constant(self.n_vars, self.p, int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, 0) + c
        return Polynomial(self.n_vars, self.p, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.n_vars, self.p, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            c = int(other) % self.p
            return Polynomial(self.n_vars, self.p, {e: v * c for e, v in self._terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        terms: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = (terms.get(e, 0) + c1 * c2) % self.p
        return Polynomial(self.n_vars, self.p, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent):
        exponent = int(exponent)
        if exponent < 0:
            raise ValueError("negative powers are not polynomials")
        result = Polynomial.constant(self.n_vars, self.p)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = Polynomial.constant(self.n_vars, self.p, int(other))
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n_vars == other.n_vars and self.p == other.p and self._terms == other._terms

    def __hash__(self):
        return hash((self.n_vars, self.p, frozenset(self._terms.items())))

    # -- evaluation -----------------------------------------------------------

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Replace x_i by images[i]."""
        if len(images) != self.n_vars:
            raise ValueError(f"need {self.n_vars} images, got {len(images)}")
        if not images:
            return Polynomial(0, self.p, {(): self._terms.get((), 0)})
        target = images[0]
        powers = [[Polynomial.constant(target.n_vars, self.p)] for _ in images]

        def power(i, k):
            cache = powers[i]
            while len(cache) <= k:
                cache.append(cache[-1] * images[i])
            return cache[k]

        result = Polynomial.zero(target.n_vars, self.p)
        for e, c in self._terms.items():
            term = Polynomial.constant(target.n_vars, self.p, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def evaluate(self, point) -> int:
        values = [int(v) % self.p for v in point]
        if len(values) != self.n_vars:
            raise ValueError(f"need a point with {self.n_vars} coordinates")
        total = 0
        for e, c in self._terms.items():
            term = c
            for v, k in zip(values, e):
                if k:
                    term = term * pow(v, k, self.p) % self.p
            total = (total + term) % self.p
        return total

    # -- rendering ------------------------------------------------------------

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.ordered_terms():
            factors = [f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(e) if k]
            mono = "*".join(factors)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Polynomial({self}, GF({self.p}), n={self.n_vars})"


def variables(n_vars, p) -> list:
    return [Polynomial.variable(n_vars, p, i) for i in range(n_vars)]


def product(polys: Iterable[Polynomial], n_vars, p) -> Polynomial:
    result = Polynomial.constant(n_vars, p)
    for f in polys:
        result = result * f
    return result


# ── Monomial coordinates ─────────────────────────────────────────────────────

@lru_cache(maxsize=None)
def monomials(n, d) -> tuple:
    """Exponent tuples of total degree d in n variables, graded-lex descending."""
    if n == 0:
        return ((),) if d == 0 else ()
    if n == 1:
        return ((d,),)
    return tuple((a,) + rest for a in range(d, -1, -1) for rest in monomials(n - 1, d - a))


@lru_cache(maxsize=None)
def monomial_index(n, d) -> dict:
    return {e: i for i, e in enumerate(monomials(n, d))}


def space_dim(n, d) -> int:
    return len(monomials(n, d))


@lru_cache(maxsize=None)
def shift_indices(n, d, var) -> np.ndarray:
    """Index in degree d+1 of (monomial * x_var) for each degree-d monomial."""
    target = monomial_index(n, d + 1)
    out = []
    for e in monomials(n, d):
        bumped = list(e)
        bumped[var] += 1
        out.append(target[tuple(bumped)])
    arr = np.array(out, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def to_vector(f: Polynomial, d) -> np.ndarray:
    """Coefficients of a homogeneous degree-d polynomial over `monomials(n, d)`."""
    index = monomial_index(f.n_vars, d)
    vec = np.zeros(len(index), dtype=np.int64)
    for e, c in f.terms.items():
        if sum(e) != d:
            raise ValueError(f"term of degree {sum(e)} in a degree-{d} coordinate vector")
        vec[index[e]] = c
    return vec


def from_vector(vec, n, d, p) -> Polynomial:
    basis = monomials(n, d)
    return Polynomial(n, p, {basis[i]: int(c) for i, c in enumerate(np.asarray(vec)) if int(c) % p})


def to_matrix(polys: Sequence[Polynomial], d, n) -> np.ndarray:
    """Rows = coordinate vectors."""
    if not polys:
        return np.zeros((0, space_dim(n, d)), dtype=np.int64)
    return np.vstack([to_vector(f, d) for f in polys])


@lru_cache(maxsize=1024)
def multiplication_matrix(g: Polynomial, d) -> np.ndarray:
    """Matrix of h -> g*h from k[V]_d into k[V]_{d + deg g}; g homogeneous."""
    if g.is_zero or not g.is_homogeneous:
        raise ValueError(f"multiplication_matrix needs a nonzero homogeneous polynomial, got {g}")
    n, e = g.n_vars, g.degree
    target = monomial_index(n, d + e)
    source = monomials(n, d)
    out = np.zeros((len(target), len(source)), dtype=np.int64)
    cols = np.arange(len(source))
    for exps, c in g.terms.items():
        rows = [target[tuple(a + b for a, b in zip(m, exps))] for m in source]
        out[rows, cols] += c
    out %= g.p
    out.setflags(write=False)
    return out


def times_variables(rows, n, d, p) -> np.ndarray:
    """Rows x_j * f for every row f of degree d and every variable x_j."""
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, space_dim(n, d))
    width = space_dim(n, d + 1)
    if rows.shape[0] == 0 or n == 0:
        return np.zeros((0, width), dtype=np.int64)
    blocks = []
    for j in range(n):
        block = np.zeros((rows.shape[0], width), dtype=np.int64)
        block[:, shift_indices(n, d, j)] = rows % p
        blocks.append(block)
    return np.vstack(blocks)


@lru_cache(maxsize=4096)
def _substitution(images_key: bytes, shape: tuple, d: int, p: int) -> np.ndarray:
    n, m = shape
    if d == 0:
        one = np.ones((1, 1), dtype=np.int64)
        one.setflags(write=False)
        return one
    images = np.frombuffer(images_key, dtype=np.int64).reshape(shape)
    prev = _substitution(images_key, shape, d - 1, p)
    source = monomials(n, d)
    prev_index = monomial_index(n, d - 1)
    first, lower = [], []
    for e in source:
        i = next(k for k, a in enumerate(e) if a)
        reduced = list(e)
        reduced[i] -= 1
        first.append(i)
        lower.append(prev_index[tuple(reduced)])
    first = np.array(first, dtype=np.int64)
    lower = np.array(lower, dtype=np.int64)

    out = np.zeros((space_dim(m, d), len(source)), dtype=np.int64)
    for j in range(m):
        coeffs = images[first, j] if len(first) else np.zeros(0, dtype=np.int64)
        if not coeffs.any():
            continue
        shifted = np.zeros((space_dim(m, d), prev.shape[1]), dtype=np.int64)
        shifted[shift_indices(m, d - 1, j)] = prev
        out = (out + shifted[:, lower] * coeffs) % p
    out.setflags(write=False)
    return out


def substitution_matrix(images, d, p) -> np.ndarray:
    """Degree-d matrix of x_i -> sum_j images[i, j] y_j.

    Columns are images of the source monomials in target coordinates. Built
    from degree d-1 by multiplying with one linear form per column.
    """
    images = np.ascontiguousarray(np.asarray(images, dtype=np.int64) % p)
    return _substitution(images.tobytes(), images.shape, int(d), int(p))


def degree_action_matrix(sigma, d, p) -> np.ndarray:
    """Matrix of f -> sigma . f on k[V]_d."""
    return substitution_matrix(gfcore.inverse(sigma, p), d, p)


@dataclass(frozen=True, eq=False)
class GradedBasis:
    """A subspace of k[V]_d, stored as an echelon row space over the monomials."""

    degree: int
    n_vars: int
    p: int
    space: Subspace

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def basis(self) -> list:
        return [from_vector(row, self.n_vars, self.degree, self.p) for row in self.space.basis]

    def coordinates(self, f: Polynomial) -> np.ndarray:
        return to_vector(f, self.degree)

    def contains(self, f: Polynomial) -> bool:
        if f.is_zero:
            return True
        return f.is_homogeneous and f.degree == self.degree and self.space.contains(to_vector(f, self.degree))

    @classmethod
    def of(cls, polys: Sequence[Polynomial], d, n, p) -> "GradedBasis":
        return cls(d, n, p, Subspace.span(to_matrix(polys, d, n), space_dim(n, d), p))

    @classmethod
    def ambient(cls, n, d, p) -> "GradedBasis":
        return cls(d, n, p, Subspace.full(space_dim(n, d), p))


# ── Group action ─────────────────────────────────────────────────────────────

def act(sigma, f: Polynomial, sigma_inverse=None) -> Polynomial:
    inv = gfcore.inverse(sigma, f.p) if sigma_inverse is None else sigma_inverse
    images = [Polynomial.linear_form(row, f.p) for row in np.asarray(inv)]
    if not images:
        return f
    return f.substitute(images)


def delta(rho: ReflectionInfo, f: Polynomial) -> Polynomial:
    """Delta_rho(f) with rho . f - f = Delta_rho(f) * x_rho."""
    moved = act(rho.matrix, f) - f
    quotient = exact_divide(moved, Polynomial.linear_form(rho.x_rho, f.p))
    if quotient is None:
        raise ConsistencyFault(f"rho.f - f is not divisible by x_rho for f = {f}")
    return quotient


def _weights(group: Group, character: Optional[Character]) -> list:
    if character is None:
        return [1] * group.order
    return [pow(character(g), -1, group.p) for g in group.elements]


@lru_cache(maxsize=512)
def _transfer_matrix(group: Group, d: int, character: Optional[Character]) -> np.ndarray:
    p = group.p
    dim = space_dim(group.n, d)
    total = np.zeros((dim, dim), dtype=np.int64)
    for weight, inv in zip(_weights(group, character), group.inverses):
        total = (total + weight * substitution_matrix(inv, d, p)) % p
    total.setflags(write=False)
    return total


def transfer_matrix(group: Group, d, character: Optional[Character] = None) -> np.ndarray:
    """Matrix on k[V]_d of f -> sum_sigma chi(sigma)^{-1} sigma . f."""
    return _transfer_matrix(group, int(d), character)


def _apply_graded(group: Group, f: Polynomial, character: Optional[Character]) -> Polynomial:
    if f.n_vars != group.n or f.p != group.p:
        raise ValueError(f"polynomial in {f.n_vars} vars over GF({f.p}) does not match the group")
    result = Polynomial.zero(group.n, group.p)
    for d, part in f.homogeneous_components().items():
        vec = transfer_matrix(group, d, character) @ to_vector(part, d) % group.p
        result = result + from_vector(vec, group.n, d, group.p)
    return result


def transfer(group: Group, f: Polynomial) -> Polynomial:
    return _apply_graded(group, f, None)


def twisted_transfer(group: Group, character: Character, f: Polynomial) -> Polynomial:
    for g in group.elements:
        character(g)
    return _apply_graded(group, f, character)


def orbit(group: Group, f: Polynomial) -> list:
    seen = []
    for g, inv in zip(group.elements, group.inverses):
        image = act(g, f, inv)
        if image not in seen:
            seen.append(image)
    return seen


def orbit_norm(group: Group, x: Polynomial) -> Polynomial:
    if not (x.is_homogeneous and x.degree == 1):
        raise ValueError(f"orbit_norm needs a linear form, got {x}")
    return product(orbit(group, x), group.n, group.p)


def is_invariant(group: Group, f: Polynomial) -> bool:
    return all(act(g, f) == f for g in group.generators)


def is_semi_invariant(group: Group, f: Polynomial, character: Character) -> bool:
    return all(act(g, f) == f * character(g) for g in group.generators)


def exact_divide(f: Polynomial, g: Polynomial) -> Optional[Polynomial]:
    """q with f = q*g, or None when g does not divide f."""
    f._check(g)
    if g.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    p = f.p
    lead_e, lead_c = g.leading_term()
    lead_inv = pow(lead_c, -1, p)
    quotient: dict = {}
    remainder = f
    while not remainder.is_zero:
        e, c = remainder.leading_term()
        shift = tuple(a - b for a, b in zip(e, lead_e))
        if min(shift, default=0) < 0:
            return None
        coeff = c * lead_inv % p
        quotient[shift] = coeff
        remainder = remainder - Polynomial(f.n_vars, p, {shift: coeff}) * g
    q = Polynomial(f.n_vars, p, quotient)
    if q * g != f:
        raise ConsistencyFault(f"exact division check failed for ({f}) / ({g})")
    return q
