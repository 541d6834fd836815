"""
Exact arithmetic over GF(p) and dense linear algebra.

Matrices are numpy int64 arrays with entries in [0, p). Every function here
returns read-only arrays so values can be shared freely. Row reduction has a
bit-packed fast path for p = 2.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

MAX_MODULUS = 2**31


class ConsistencyFault(RuntimeError):
    """A mathematical impossibility was observed: a bug or a falsified claim."""


# ── Field elements ───────────────────────────────────────────────────────────

def is_prime(p) -> bool:
    if not isinstance(p, int) or isinstance(p, bool) or p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    for d in range(3, math.isqrt(p) + 1, 2):
        if p % d == 0:
            return False
    return True


def check_modulus(p):
    if not is_prime(p):
        raise ValueError(f"p={p} is not a prime")
    if p > MAX_MODULUS:
        raise ValueError(f"p={p} exceeds the supported modulus 2^31")
    return p


def inv_mod(a, p) -> int:
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse in GF({p})")
    return pow(a, -1, p)


@dataclass(frozen=True)
class FieldElement:
    """Residue class `value` mod the prime `p`."""

    value: int
    p: int

    def __post_init__(self):
        if not 0 <= self.value < self.p:
            raise ValueError(f"value {self.value} is not reduced mod {self.p}")

    @classmethod
    def of(cls, value, p):
        return cls(int(value) % p, p)

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise ValueError(f"cannot mix GF({self.p}) and GF({other.p})")
            return other.value
        return int(other) % self.p

    def __add__(self, other):
        return FieldElement((self.value + self._coerce(other)) % self.p, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement((self.value - self._coerce(other)) % self.p, self.p)

    def __rsub__(self, other):
        return FieldElement((self._coerce(other) - self.value) % self.p, self.p)

    def __mul__(self, other):
        return FieldElement((self.value * self._coerce(other)) % self.p, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement((-self.value) % self.p, self.p)

    def inverse(self):
        return FieldElement(inv_mod(self.value, self.p), self.p)

    def __truediv__(self, other):
        return self * FieldElement(self._coerce(other), self.p).inverse()

    def __pow__(self, exponent):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return FieldElement(pow(self.value, exponent, self.p), self.p)

    def __int__(self):
        return self.value

    def __str__(self):
        return str(self.value)


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def sub(a: FieldElement, b: FieldElement) -> FieldElement:
    return a - b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def neg(a: FieldElement) -> FieldElement:
    return -a


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


def primitive_root(p) -> int:
    """Smallest generator of GF(p)^*."""
    if p == 2:
        return 1
    order = p - 1
    factors = set()
    m = order
    d = 2
    while d * d <= m:
        while m % d == 0:
            factors.add(d)
            m //= d
        d += 1
    if m > 1:
        factors.add(m)
    for g in range(2, p):
        if all(pow(g, order // q, p) != 1 for q in factors):
            return g
    raise ConsistencyFault(f"no primitive root found mod {p}")


# ── Matrices ─────────────────────────────────────────────────────────────────

def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def as_matrix(entries, p) -> np.ndarray:
    """Reduce integer entries mod p into a read-only int64 matrix."""
    rows = [[int(v) % p for v in row] for row in entries]
    if not rows:
        return _frozen(np.zeros((0, 0), dtype=np.int64))
    widths = {len(row) for row in rows}
    if len(widths) != 1:
        raise ValueError(f"ragged matrix rows of lengths {sorted(widths)}")
    return _frozen(np.array(rows, dtype=np.int64).reshape(len(rows), widths.pop()))


def as_vector(entries, p) -> np.ndarray:
    arr = np.array([int(v) % p for v in entries], dtype=np.int64)
    return _frozen(arr)


def matrix_key(matrix: np.ndarray) -> bytes:
    return np.ascontiguousarray(matrix, dtype=np.int64).tobytes()


def identity(n, p) -> np.ndarray:
    return _frozen(np.eye(n, dtype=np.int64))


def mat_mul(a: np.ndarray, b: np.ndarray, p) -> np.ndarray:
    inner = a.shape[-1] if a.ndim else 1
    if inner * (p - 1) ** 2 < 2**63:
        return _frozen((np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % p)
    wide = (np.asarray(a, dtype=object) @ np.asarray(b, dtype=object)) % p
    return _frozen(wide.astype(np.int64))


def mat_sub(a, b, p) -> np.ndarray:
    return _frozen((np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64)) % p)


@dataclass(frozen=True)
class RowReduceResult:
    matrix: np.ndarray
    rank: int
    pivots: tuple


def _rref_gf2(matrix: np.ndarray) -> RowReduceResult:
    bits = (np.asarray(matrix, dtype=np.int64) & 1).astype(np.uint8)
    rows, cols = bits.shape
    packed = np.packbits(bits, axis=1)
    pivots = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        byte, shift = divmod(col, 8)
        mask = np.uint8(0x80 >> shift)
        hits = np.nonzero(packed[row:, byte] & mask)[0]
        if hits.size == 0:
            continue
        pivot = row + int(hits[0])
        if pivot != row:
            packed[[row, pivot]] = packed[[pivot, row]]
        column = (packed[:, byte] & mask) != 0
        column[row] = False
        if column.any():
            packed[column] ^= packed[row]
        pivots.append(col)
        row += 1
    reduced = np.unpackbits(packed, axis=1, count=cols).astype(np.int64) if cols else np.zeros((rows, 0), dtype=np.int64)
    return RowReduceResult(matrix=_frozen(reduced), rank=len(pivots), pivots=tuple(pivots))


def rref(matrix, p) -> RowReduceResult:
    """Reduced row echelon form over GF(p), leading coefficients equal to 1."""
    mat = np.array(matrix, dtype=np.int64) % p
    if mat.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {mat.shape}")
    if p == 2:
        return _rref_gf2(mat)
    rows, cols = mat.shape
    pivots = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        hits = np.nonzero(mat[row:, col])[0]
        if hits.size == 0:
            continue
        pivot = row + int(hits[0])
        if pivot != row:
            mat[[row, pivot]] = mat[[pivot, row]]
        lead_inv = pow(int(mat[row, col]), -1, p)
        mat[row] = (mat[row] * lead_inv) % p
        column = mat[:, col].copy()
        column[row] = 0
        targets = np.nonzero(column)[0]
        if targets.size:
            mat[targets] = (mat[targets] - np.outer(column[targets], mat[row])) % p
        pivots.append(col)
        row += 1
    return RowReduceResult(matrix=_frozen(mat), rank=len(pivots), pivots=tuple(pivots))


def rank(matrix, p) -> int:
    return rref(matrix, p).rank


def inverse(matrix, p) -> np.ndarray:
    mat = np.asarray(matrix, dtype=np.int64)
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise ValueError(f"cannot invert a non-square matrix of shape {mat.shape}")
    reduced = rref(np.hstack([mat % p, np.eye(n, dtype=np.int64)]), p)
    if reduced.pivots[:n] != tuple(range(n)):
        raise ValueError("singular matrix has no inverse")
    return _frozen(reduced.matrix[:, n:])


def is_invertible(matrix, p) -> bool:
    mat = np.asarray(matrix)
    return mat.ndim == 2 and mat.shape[0] == mat.shape[1] and rank(mat, p) == mat.shape[0]


def characteristic_polynomial(matrix, p) -> tuple:
    """Coefficients of det(tI - M), constant term first."""
    mat = np.asarray(matrix, dtype=np.int64) % p
    n = mat.shape[0]
    total = np.zeros(n + 1, dtype=object)
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = [False] * n
        for start in range(n):
            if seen[start]:
                continue
            length = 0
            j = start
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
        term = np.array([sign], dtype=object)
        for i in range(n):
            # entry (i, perm[i]) of tI - M
            factor = np.array([-int(mat[i, perm[i]]), 1 if i == perm[i] else 0], dtype=object)
            term = np.convolve(term, factor)
        total[: len(term)] += term
    return tuple(int(c) % p for c in total)


# ── Solving ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Subspace:
    """Row space of `basis`, kept in reduced echelon form (canonical)."""

    ambient_dim: int
    p: int
    basis: np.ndarray
    pivots: tuple

    @classmethod
    def span(cls, vectors, ambient_dim, p) -> "Subspace":
        rows = np.asarray(vectors, dtype=np.int64)
        if rows.size == 0:
            return cls.zero(ambient_dim, p)
        rows = rows.reshape(-1, ambient_dim)
        reduced = rref(rows, p)
        return cls(ambient_dim, p, _frozen(reduced.matrix[: reduced.rank]), reduced.pivots)

    @classmethod
    def zero(cls, ambient_dim, p) -> "Subspace":
        return cls(ambient_dim, p, _frozen(np.zeros((0, ambient_dim), dtype=np.int64)), ())

    @classmethod
    def full(cls, ambient_dim, p) -> "Subspace":
        return cls(ambient_dim, p, identity(ambient_dim, p), tuple(range(ambient_dim)))

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.dim

    def _check(self, other: "Subspace"):
        if other.ambient_dim != self.ambient_dim or other.p != self.p:
            raise ValueError(
                f"ambient mismatch: GF({self.p})^{self.ambient_dim} vs GF({other.p})^{other.ambient_dim}"
            )

    def reduce(self, vectors) -> np.ndarray:
        """Remainders of `vectors` after clearing this subspace's pivot columns."""
        rows = np.array(vectors, dtype=np.int64).reshape(-1, self.ambient_dim) % self.p
        for i, col in enumerate(self.pivots):
            coeff = rows[:, col].copy()
            if coeff.any():
                rows = (rows - np.outer(coeff, self.basis[i])) % self.p
        return rows

    def contains(self, vector) -> bool:
        return not self.reduce(vector).any()

    def contains_subspace(self, other: "Subspace") -> bool:
        self._check(other)
        return other.dim == 0 or not self.reduce(other.basis).any()

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.span(np.vstack([self.basis, other.basis]), self.ambient_dim, self.p)

    def intersection(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return (self.perp() + other.perp()).perp()

    def perp(self) -> "Subspace":
        """Annihilator under the standard pairing of k^n with its dual."""
        return kernel(self.basis, self.p) if self.dim else Subspace.full(self.ambient_dim, self.p)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.p == other.p
            and self.basis.shape == other.basis.shape
            and self.basis.tobytes() == other.basis.tobytes()
        )

    def __hash__(self):
        return hash((self.ambient_dim, self.p, self.basis.tobytes()))

    def __repr__(self):
        return f"Subspace(GF({self.p})^{self.ambient_dim}, dim={self.dim}, basis={self.basis.tolist()})"


def subspace_sum(u: Subspace, w: Subspace) -> Subspace:
    return u + w


def subspace_intersection(u: Subspace, w: Subspace) -> Subspace:
    return u.intersection(w)


def subspace_perp(u: Subspace) -> Subspace:
    return u.perp()


def subspace_contains(u: Subspace, w: Subspace) -> bool:
    return u.contains_subspace(w)


def kernel(matrix, p) -> Subspace:
    """Right nullspace {v : A v = 0}."""
    mat = np.asarray(matrix, dtype=np.int64)
    cols = mat.shape[1]
    if mat.shape[0] == 0:
        return Subspace.full(cols, p)
    reduced = rref(mat, p)
    pivot_set = set(reduced.pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    if not free:
        return Subspace.zero(cols, p)
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for row, col in enumerate(reduced.pivots):
            basis[k, col] = (-reduced.matrix[row, f]) % p
    return Subspace.span(basis, cols, p)


def image(matrix, p) -> Subspace:
    """Column space of A."""
    mat = np.asarray(matrix, dtype=np.int64)
    return Subspace.span(mat.T, mat.shape[0], p)


@dataclass(frozen=True)
class SolveResult:
    rank: int
    solution: Optional[np.ndarray]
    kernel: Subspace
    augmented_rank: Optional[int] = None

    @property
    def consistent(self) -> bool:
        return self.solution is not None


def rank_solve(matrix, p, rhs=None) -> SolveResult:
    """Rank, kernel and (when `rhs` is given and reachable) a particular solution."""
    mat = np.asarray(matrix, dtype=np.int64) % p
    rows, cols = mat.shape
    null = kernel(mat, p)
    if rhs is None:
        return SolveResult(rank=cols - null.dim, solution=None, kernel=null)
    b = np.asarray(rhs, dtype=np.int64).reshape(rows, 1) % p
    reduced = rref(np.hstack([mat, b]), p)
    coefficient_rank = cols - null.dim
    if cols in reduced.pivots:
        return SolveResult(rank=coefficient_rank, solution=None, kernel=null, augmented_rank=reduced.rank)
    solution = np.zeros(cols, dtype=np.int64)
    for row, col in enumerate(reduced.pivots):
        solution[col] = reduced.matrix[row, cols]
    return SolveResult(rank=coefficient_rank, solution=_frozen(solution), kernel=null, augmented_rank=reduced.rank)


def independent_rows(rows, p, base: Optional[Subspace] = None) -> list:
    """Indices of rows that extend `base` greedily, in the given order."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        return []
    residues = base.reduce(rows) if base is not None and base.dim else rows % p
    echelon: list = []
    chosen = []
    for idx, row in enumerate(residues):
        vec = row.copy()
        for pivot, basis_row in echelon:
            c = vec[pivot]
            if c:
                vec = (vec - c * basis_row) % p
        nz = np.nonzero(vec)[0]
        if nz.size == 0:
            continue
        pivot = int(nz[0])
        vec = (vec * pow(int(vec[pivot]), -1, p)) % p
        echelon.append((pivot, vec))
        chosen.append(idx)
    return chosen


def stack_rows(blocks: Iterable[np.ndarray], width: int) -> np.ndarray:
    parts = [np.asarray(b, dtype=np.int64).reshape(-1, width) for b in blocks]
    parts = [b for b in parts if b.size]
    if not parts:
        return np.zeros((0, width), dtype=np.int64)
    return np.vstack(parts)


def vectors_of(rows: Sequence) -> list:
    return [tuple(int(v) for v in row) for row in rows]
