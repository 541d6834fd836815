"""
The different of an abelian group, the direct summand property and the
maps built from a DSP witness.

The different is assembled hyperplane by hyperplane: for each reflecting
hyperplane H with pointwise stabilizer G_H, the exponent a_H is the largest a
such that x_H^a divides every twisted transfer Tr^{G_H}_{chi_H^a}(f). The DSP
holds iff some theta~ of degree deg(theta) has Tr_{chi_theta}(theta~) = theta,
which is one linear system in monomial coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from coregular import gfcore
from coregular.gfcore import ConsistencyFault, Subspace
from coregular.invar import InvariantTable, invariant_ideal_generators
from coregular.matrixgroup import (
    Character,
    Decomposition,
    ElementKind,
    Group,
    decompose,
    hyperplanes,
    reflection_census,
    trivial_character,
)
from coregular.polyact import (
    Polynomial,
    act,
    exact_divide,
    from_vector,
    monomials,
    to_vector,
    transfer_matrix,
    twisted_transfer,
)


# ── Hyperplane exponents ─────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class HyperplaneExponent:
    form: np.ndarray
    kind: ElementKind
    stabilizer_order: int
    exponent: int
    witness: Polynomial
    test_bound: int
    cap: int

    @property
    def form_polynomial(self) -> Polynomial:
        return Polynomial.linear_form(self.form, int(self.witness.p))

    @property
    def matches_order_minus_one(self) -> bool:
        return self.exponent == self.stabilizer_order - 1

    def as_dict(self) -> dict:
        return {
            "form": str(self.form_polynomial),
            "kind": self.kind.value,
            "stabilizer_order": self.stabilizer_order,
            "exponent": self.exponent,
            "maximality_witness": str(self.witness),
            "test_bound": self.test_bound,
            "cap": self.cap,
        }


class ExponentCapError(ConsistencyFault):
    """The exponent search passed its cap without finding a failing degree."""


def _exponent_tuples(n, top) -> list:
    """All exponent tuples in n variables of total degree <= top."""
    out = []
    for d in range(top + 1):
        out.extend(monomials(n, d))
    return out


def hyperplane_exponent(
    stabilizer: Group,
    form,
    character: Character,
    kind: ElementKind = ElementKind.TRANSVECTION,
    cap: Optional[int] = None,
) -> HyperplaneExponent:
    """a_H for the hyperplane x_H = 0 with pointwise stabilizer G_H.

    In coordinates (x_H, x_j for j != lead) every sigma in G_H sends
    x_j -> x_j + c_{sigma,j} x_H and x_H -> chi(sigma) x_H. The transfer
    Tr_{chi^a}(x_H^b * x^k) is divisible by x_H^a iff every sum
    S(b, i) = sum_sigma chi(sigma)^(b - a) prod_j c_{sigma,j}^(i_j) with
    b + |i| < a vanishes, so only monomials of degree < a are tested.
    """
    p, n = stabilizer.p, stabilizer.n
    x = np.asarray(form, dtype=np.int64) % p
    lead = int(np.nonzero(x)[0][0])
    others = [j for j in range(n) if j != lead]
    order = stabilizer.order
    if order < 2:
        raise ValueError("hyperplane_exponent needs a nontrivial pointwise stabilizer")
    cap = 2 * (order - 1) if cap is None else int(cap)

    chis, shifts = [], []
    for element, inverse in zip(stabilizer.elements, stabilizer.inverses):
        image = (x @ inverse) % p
        if not np.array_equal(image, (image[lead] * x) % p):
            raise ConsistencyFault(f"x_H is not semi-invariant under {element.tolist()}")
        chis.append(int(character(element)))
        shifts.append([int((inverse[j, lead] - (1 if j == lead else 0)) % p) for j in others])

    ks = _exponent_tuples(len(others), cap)
    # prod_j c_{sigma,j}^(k_j), with 0^0 = 1
    table = np.array(
        [[math.prod(pow(c, k, p) for c, k in zip(row, kv)) % p for kv in ks] for row in shifts],
        dtype=np.int64,
    )
    weights_k = np.array([sum(kv) for kv in ks], dtype=np.int64)

    def first_failure(a):
        for b in range(a):
            weights = np.array([pow(c, b - a, p) for c in chis], dtype=np.int64)
            sums = (weights @ table) % p
            bad = np.nonzero((sums != 0) & (weights_k <= a - 1 - b))[0]
            if bad.size:
                return b, ks[int(bad[0])]
        return None

    failures = {a: first_failure(a) for a in range(1, cap + 2)}
    passing = [a for a, fail in failures.items() if fail is None]
    if not passing:
        raise ConsistencyFault(f"x_H does not divide Tr_chi(1) for the hyperplane {x.tolist()}")
    exponent = max(passing)
    if exponent == cap + 1:
        raise ExponentCapError(
            f"exponent of hyperplane {x.tolist()} exceeds the cap {cap} (|G_H| = {order}); "
            "rerun with a larger cap"
        )

    b, kv = failures[exponent + 1]
    witness = Polynomial.linear_form(x, p) ** b
    for j, k in zip(others, kv):
        if k:
            witness = witness * Polynomial.variable(n, p, j) ** k
    return HyperplaneExponent(
        form=gfcore.as_vector(x, p),
        kind=kind,
        stabilizer_order=order,
        exponent=exponent,
        witness=witness,
        test_bound=cap,
        cap=cap,
    )


# ── The different ────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class DifferentResult:
    exponents: tuple
    theta: Polynomial
    theta_character: Character
    findings: tuple = ()

    @property
    def degree(self) -> int:
        return sum(h.exponent for h in self.exponents)

    def as_dict(self) -> dict:
        return {
            "theta": str(self.theta),
            "degree": self.degree,
            "character_trivial": self.theta_character.is_trivial,
            "hyperplanes": [h.as_dict() for h in self.exponents],
            "findings": list(self.findings),
        }


def _forms_vanish_on(result: DifferentResult, subspace: Subspace) -> bool:
    if not subspace.dim:
        return True
    return all(not ((subspace.basis @ h.form) % subspace.p).any() for h in result.exponents)


def different(group: Group, check_factorization: bool = True, census=None) -> DifferentResult:
    """theta = prod x_H^{a_H} with its character; checks theta_G = theta_T * theta_D."""
    if not group.is_abelian:
        raise ValueError("the different is computed for abelian groups only")
    p, n = group.p, group.n
    census = census or reflection_census(group)
    exponents, findings = [], []
    theta = Polynomial.constant(n, p)
    character = trivial_character(group)
    for hyperplane in hyperplanes(group, census):
        result = hyperplane_exponent(hyperplane.stabilizer, hyperplane.form, hyperplane.character, hyperplane.kind)
        exponents.append(result)
        theta = theta * Polynomial.linear_form(hyperplane.form, p) ** result.exponent
        character = character * hyperplane.character ** result.exponent
        if not result.matches_order_minus_one:
            findings.append(
                f"a_H = {result.exponent} differs from |G_H| - 1 = {result.stabilizer_order - 1} "
                f"for hyperplane {result.form_polynomial}"
            )

    for g in group.generators:
        if act(g, theta) != theta * character(g):
            raise ConsistencyFault(f"theta = {theta} is not semi-invariant under {g.tolist()}")

    result = DifferentResult(tuple(exponents), theta, character, tuple(findings))
    if check_factorization and census.is_reflection_group:
        dec = decompose(group, census)
        diff_t = different(dec.T, check_factorization=False)
        diff_d = different(dec.D, check_factorization=False)
        problems = []
        if diff_t.theta * diff_d.theta != theta:
            problems.append(f"theta_T * theta_D = {diff_t.theta * diff_d.theta} != theta_G = {theta}")
        if not _forms_vanish_on(diff_t, dec.V_moved_D):
            problems.append("a T-hyperplane form does not vanish on V_D")
        if not _forms_vanish_on(diff_d, dec.V_fixed_D):
            problems.append("a D-hyperplane form does not vanish on V^D")
        if problems:
            raise ConsistencyFault("different factorization failed: " + "; ".join(problems))
    return result


# ── Direct summand property ──────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class DspResult:
    holds: bool
    witness: Optional[Polynomial]
    degree: int
    system_rank: int
    augmented_rank: Optional[int]
    system_dim: int

    def as_dict(self) -> dict:
        return {
            "holds": self.holds,
            "witness": str(self.witness) if self.witness is not None else None,
            "degree": self.degree,
            "system_rank": self.system_rank,
            "augmented_rank": self.augmented_rank,
            "system_dim": self.system_dim,
        }


def dsp_check(group: Group, diff: DifferentResult) -> DspResult:
    """Solve Tr_{chi_theta}(w) = theta for w in k[V]_{deg theta}."""
    p, n = group.p, group.n
    degree = diff.theta.degree
    matrix = transfer_matrix(group, degree, diff.theta_character)
    target = to_vector(diff.theta, degree)
    solved = gfcore.rank_solve(matrix, p, target)
    if not solved.consistent:
        return DspResult(False, None, degree, solved.rank, solved.augmented_rank, matrix.shape[1])

    witness = from_vector(solved.solution, n, degree, p)
    image = twisted_transfer(group, diff.theta_character, witness)
    if image != diff.theta or exact_divide(image, diff.theta) != Polynomial.constant(n, p):
        raise ConsistencyFault(f"DSP witness {witness} does not give Tr(w / theta) = 1")
    return DspResult(True, witness, degree, solved.rank, solved.augmented_rank, matrix.shape[1])


def projection_apply(group: Group, diff: DifferentResult, dsp: DspResult, f: Polynomial) -> Polynomial:
    """pi(f) = Tr(theta~ f / theta), a graded k[V]^G-linear projection onto k[V]^G."""
    if not dsp.holds:
        raise ValueError("the projection needs a DSP witness")
    numerator = twisted_transfer(group, diff.theta_character, dsp.witness * f)
    quotient = exact_divide(numerator, diff.theta)
    if quotient is None:
        raise ConsistencyFault(f"Tr(theta~ f) is not divisible by theta for f = {f}")
    return quotient


# ── Transfer image ───────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class TransferImageProfile:
    per_degree_dims: tuple
    generators: tuple
    degenerate: bool
    degree_bound: int

    @property
    def min_generators(self) -> int:
        return 1 if self.degenerate else len(self.generators)

    @property
    def principal(self) -> bool:
        return self.min_generators == 1

    @property
    def generator(self) -> Optional[Polynomial]:
        return self.generators[0] if self.principal and self.generators else None

    def as_dict(self) -> dict:
        return {
            "min_generators": self.min_generators,
            "principal": self.principal,
            "degenerate": self.degenerate,
            "generators": [str(g) for g in self.generators],
            "per_degree_dims": list(self.per_degree_dims),
            "degree_bound": self.degree_bound,
        }


def transfer_image_profile(group: Group, table: InvariantTable, bound) -> TransferImageProfile:
    """Im Tr as an ideal of k[V]^G, minimal generators by graded Nakayama."""
    p, n = group.p, group.n
    slices = {}
    for d in range(0, bound + 1):
        matrix = transfer_matrix(group, d)
        slices[d] = Subspace.span(matrix.T, matrix.shape[0], p)
    dims = tuple(slices[d].dim for d in range(bound + 1))
    if slices[0].dim:
        # Tr(1) = |G| is a unit: the image is all of k[V]^G.
        return TransferImageProfile(dims, (Polynomial.constant(n, p),), True, bound)
    for d in range(1, bound + 1):
        if not table[d].space.contains_subspace(slices[d]):
            raise ConsistencyFault(f"transfer image in degree {d} is not invariant")
    generators = invariant_ideal_generators(slices, table, bound)
    return TransferImageProfile(dims, tuple(generators), False, bound)


# ── Moving witnesses between G and its transvection part ─────────────────────

def _to_adapted(f: Polynomial, dec: Decomposition) -> Polynomial:
    """Rewrite f in the coordinates (y_1..y_m, z_1..) dual to the adapted basis."""
    return f.substitute([Polynomial.linear_form(row, f.p) for row in dec.adapted_basis])


def _from_adapted(f: Polynomial, dec: Decomposition) -> Polynomial:
    return f.substitute([Polynomial.linear_form(row, f.p) for row in dec.dual_basis])


def project_to_fixed(f: Polynomial, dec: Decomposition) -> Polynomial:
    """Drop every term involving a V_D coordinate."""
    adapted = _to_adapted(f, dec)
    kept = {e: c for e, c in adapted.terms.items() if not any(e[dec.m:])}
    return _from_adapted(Polynomial(f.n_vars, f.p, kept), dec)


def _is_dsp_witness(group: Group, diff: DifferentResult, witness: Polynomial) -> bool:
    return twisted_transfer(group, diff.theta_character, witness) == diff.theta


@dataclass(frozen=True, eq=False)
class WitnessTransport:
    witness: Optional[Polynomial]
    projected: Optional[Polynomial]
    verified: bool
    projected_verified: bool

    def as_dict(self) -> dict:
        return {
            "witness": str(self.witness) if self.witness is not None else None,
            "projected": str(self.projected) if self.projected is not None else None,
            "verified": self.verified,
            "projected_verified": self.projected_verified,
        }


def restrict_dsp_witness(group: Group, dec: Decomposition, dsp_g: DspResult) -> WitnessTransport:
    """theta^_T = Tr^D_{chi_{theta_D}}(theta~_G) / theta_D, checked for T, then projected to k[V^D]."""
    if not dsp_g.holds:
        raise ValueError("restrict_dsp_witness needs a DSP witness for G")
    diff_t = different(dec.T, check_factorization=False)
    diff_d = different(dec.D, check_factorization=False)
    pushed = twisted_transfer(dec.D, diff_d.theta_character, dsp_g.witness)
    witness = exact_divide(pushed, diff_d.theta)
    if witness is None:
        raise ConsistencyFault(f"Tr^D(theta~_G) = {pushed} is not divisible by theta_D = {diff_d.theta}")
    projected = project_to_fixed(witness, dec)
    result = WitnessTransport(
        witness=witness,
        projected=projected,
        verified=_is_dsp_witness(dec.T, diff_t, witness),
        projected_verified=_is_dsp_witness(dec.T, diff_t, projected),
    )
    if not (result.verified and result.projected_verified):
        raise ConsistencyFault(f"restricted DSP witness failed for T: {result.as_dict()}")
    return result


def lift_dsp_witness(group: Group, dec: Decomposition, witness_t: Polynomial) -> WitnessTransport:
    """theta~_G = |D|^{-1} theta_D theta~_T for a witness theta~_T in k[V^D]."""
    diff_g = different(group, check_factorization=False)
    diff_d = different(dec.D, check_factorization=False)
    scale = gfcore.inv_mod(dec.D.order, group.p)
    lifted = diff_d.theta * witness_t * scale
    verified = _is_dsp_witness(group, diff_g, lifted)
    if not verified:
        raise ConsistencyFault(f"lifted witness {lifted} fails Tr^G(theta~ / theta) = 1")
    return WitnessTransport(witness=lifted, projected=None, verified=True, projected_verified=True)


def dsp_of(group: Group) -> DspResult:
    return dsp_check(group, different(group, check_factorization=False))
