import unittest

import numpy as np

from coregular.diffr import (
    ExponentCapError,
    different,
    dsp_check,
    dsp_of,
    hyperplane_exponent,
    lift_dsp_witness,
    project_to_fixed,
    projection_apply,
    restrict_dsp_witness,
    transfer_image_profile,
)
from coregular.gfcore import ConsistencyFault
from coregular.harness import WORKED_EXAMPLE_GENERATORS
from coregular.invar import InvariantTable
from coregular.matrixgroup import ElementKind, close_group, decompose, hyperplanes, trivial_character
from coregular.polyact import (
    Polynomial,
    from_vector,
    is_invariant,
    monomials,
    space_dim,
    twisted_transfer,
    variables,
)

TAU = [[1, 0, 0], [0, 1, 0], [1, 0, 1]]
DELTA = [[1, 0, 0], [0, 2, 0], [0, 0, 1]]


def example_group():
    return close_group(2, 4, WORKED_EXAMPLE_GENERATORS)


def mixed_group():
    return close_group(3, 3, [TAU, DELTA])


def transvection_group(p):
    return close_group(p, 2, [[[1, 0], [1, 1]]])


def homology_group():
    return close_group(3, 2, [[[1, 0], [0, 2]]])


class HyperplaneExponentTests(unittest.TestCase):
    def test_order_two_transvection(self):
        group = transvection_group(2)
        result = hyperplane_exponent(group, [1, 0], trivial_character(group))
        self.assertEqual(result.exponent, 1)
        self.assertEqual(str(result.witness), "x2")
        self.assertEqual(result.cap, 2)
        self.assertTrue(result.matches_order_minus_one)

    def test_order_three_transvection(self):
        group = transvection_group(3)
        result = hyperplane_exponent(group, [1, 0], trivial_character(group))
        self.assertEqual(result.exponent, 2)
        self.assertEqual(result.stabilizer_order, 3)

    def test_homology(self):
        group = homology_group()
        plane = hyperplanes(group)[0]
        result = hyperplane_exponent(plane.stabilizer, plane.form, plane.character, ElementKind.HOMOLOGY)
        self.assertEqual(result.exponent, 1)
        self.assertEqual(result.as_dict()["kind"], "homology")
        self.assertEqual(result.as_dict()["form"], "x2")

    def test_cap_overflow(self):
        group = transvection_group(2)
        with self.assertRaises(ExponentCapError):
            hyperplane_exponent(group, [1, 0], trivial_character(group), cap=0)
        self.assertTrue(issubclass(ExponentCapError, ConsistencyFault))

    def test_trivial_stabilizer_is_rejected(self):
        group = close_group(3, 2, [])
        with self.assertRaises(ValueError):
            hyperplane_exponent(group, [1, 0], trivial_character(group))


class DifferentTests(unittest.TestCase):
    def test_example_different(self):
        diff = different(example_group())
        self.assertEqual(str(diff.theta), "x1^2*x2 + x1*x2^2")
        self.assertEqual(diff.degree, 3)
        self.assertEqual({str(h.form_polynomial) for h in diff.exponents}, {"x1", "x2", "x1 + x2"})
        self.assertTrue(diff.theta_character.is_trivial)
        self.assertEqual(diff.findings, ())

    def test_mixed_different(self):
        diff = different(mixed_group())
        self.assertEqual(str(diff.theta), "x1^2*x2")
        self.assertEqual([h.exponent for h in diff.exponents], [2, 1])
        self.assertFalse(diff.theta_character.is_trivial)

    def test_example_hyperplanes(self):
        planes = hyperplanes(example_group())
        self.assertEqual(sorted(str(Polynomial.linear_form(h.form, 2)) for h in planes), ["x1", "x1 + x2", "x2"])
        for plane in planes:
            self.assertEqual(plane.stabilizer.order, 2)
            self.assertTrue(plane.character.is_trivial)
            self.assertIs(plane.kind, ElementKind.TRANSVECTION)

    def test_no_cubic_monomial_transfers_to_theta(self):
        group = example_group()
        diff = different(group)
        multiples = [diff.theta * c for c in range(1, group.p)]
        for m in monomials(4, 3):
            image = twisted_transfer(group, diff.theta_character, Polynomial.monomial(m, 2))
            self.assertNotIn(image, multiples, str(m))

    def test_no_reflections(self):
        diff = different(close_group(5, 2, [[[4, 0], [0, 4]]]))
        self.assertEqual(diff.theta, 1)
        self.assertEqual(diff.exponents, ())

    def test_non_abelian_is_rejected(self):
        with self.assertRaises(ValueError):
            different(close_group(3, 2, [[[1, 1], [0, 1]], [[1, 0], [1, 1]]]))


class DspTests(unittest.TestCase):
    def test_transvection_witness(self):
        group = transvection_group(2)
        dsp = dsp_of(group)
        self.assertTrue(dsp.holds)
        self.assertEqual(str(dsp.witness), "x2")
        self.assertEqual(dsp.degree, 1)

    def test_homology_witness(self):
        dsp = dsp_of(homology_group())
        self.assertTrue(dsp.holds)
        self.assertEqual(str(dsp.witness), "2*x2")

    def test_example_has_no_witness(self):
        group = example_group()
        dsp = dsp_check(group, different(group))
        self.assertFalse(dsp.holds)
        self.assertIsNone(dsp.witness)
        self.assertGreater(dsp.augmented_rank, dsp.system_rank)
        self.assertIsNone(dsp.as_dict()["witness"])

    def test_mixed_group_holds(self):
        self.assertTrue(dsp_of(mixed_group()).holds)

    def test_non_modular_group_uses_constant_witness(self):
        dsp = dsp_of(close_group(5, 2, [[[4, 0], [0, 4]]]))
        self.assertTrue(dsp.holds)
        self.assertEqual(str(dsp.witness), "3")


class ProjectionTests(unittest.TestCase):
    def test_projection_values(self):
        group = transvection_group(2)
        diff = different(group)
        dsp = dsp_check(group, diff)
        x1, x2 = variables(2, 2)
        self.assertEqual(projection_apply(group, diff, dsp, Polynomial.constant(2, 2)), 1)
        self.assertEqual(projection_apply(group, diff, dsp, x1), x1)
        self.assertEqual(projection_apply(group, diff, dsp, x2), x1)
        projected = projection_apply(group, diff, dsp, x2 ** 2)
        self.assertEqual(projected, x1 ** 2 + x1 * x2 + x2 ** 2)
        self.assertTrue(is_invariant(group, projected))

    def test_projection_is_linear_over_invariants_and_idempotent(self):
        rng = np.random.default_rng(21)
        cases = []
        for group in (transvection_group(2), transvection_group(3), homology_group(), mixed_group()):
            diff = different(group)
            cases.append((group, diff, dsp_check(group, diff), InvariantTable(group, 2)))
        for i in range(200):
            group, diff, dsp, table = cases[i % len(cases)]
            n, p = group.n, group.p
            d = int(rng.integers(0, 3))
            f = from_vector(rng.integers(0, p, size=space_dim(n, d)), n, d, p)
            e = int(rng.integers(0, 3))
            inv = table[e]
            h = from_vector(rng.integers(0, p, size=inv.dim) @ inv.space.basis % p, n, e, p)
            projected = projection_apply(group, diff, dsp, f)
            self.assertTrue(is_invariant(group, projected))
            self.assertEqual(projection_apply(group, diff, dsp, h * f), h * projected)
            self.assertEqual(projection_apply(group, diff, dsp, projected), projected)
            self.assertEqual(projection_apply(group, diff, dsp, h), h)

    def test_projection_needs_witness(self):
        group = example_group()
        diff = different(group)
        with self.assertRaises(ValueError):
            projection_apply(group, diff, dsp_check(group, diff), Polynomial.constant(4, 2))


class TransferImageTests(unittest.TestCase):
    def test_principal_for_coregular_p_group(self):
        group = transvection_group(2)
        profile = transfer_image_profile(group, InvariantTable(group, 4), 4)
        self.assertTrue(profile.principal)
        self.assertFalse(profile.degenerate)
        self.assertEqual(str(profile.generator), "x1")

    def test_not_principal_for_example(self):
        group = example_group()
        profile = transfer_image_profile(group, InvariantTable(group, 6), 6)
        self.assertFalse(profile.principal)
        self.assertGreater(profile.min_generators, 1)

    def test_degenerate_when_order_is_a_unit(self):
        group = close_group(5, 2, [[[4, 0], [0, 4]]])
        profile = transfer_image_profile(group, InvariantTable(group, 3), 3)
        self.assertTrue(profile.degenerate)
        self.assertTrue(profile.principal)
        self.assertEqual(profile.as_dict()["generators"], ["1"])


class WitnessTransportTests(unittest.TestCase):
    def test_restrict_then_lift(self):
        group = mixed_group()
        dec = decompose(group)
        restricted = restrict_dsp_witness(group, dec, dsp_of(group))
        self.assertTrue(restricted.verified)
        self.assertTrue(restricted.projected_verified)
        lifted = lift_dsp_witness(group, dec, restricted.projected)
        self.assertTrue(lifted.verified)

    def test_project_to_fixed_drops_moved_coordinates(self):
        dec = decompose(mixed_group())
        x1, x2, x3 = variables(3, 3)
        self.assertEqual(project_to_fixed(x1 * x2 + x3 ** 2, dec), x3 ** 2)
        self.assertEqual(project_to_fixed(x1 + x3, dec), x1 + x3)

    def test_restrict_needs_witness(self):
        group = example_group()
        dec = decompose(group)
        with self.assertRaises(ValueError):
            restrict_dsp_witness(group, dec, dsp_of(group))


if __name__ == "__main__":
    unittest.main()
