import os
import unittest

from coregular import config
from coregular.diffr import dsp_of
from coregular.gfcore import Subspace
from coregular.harness import WORKED_EXAMPLE_GENERATORS, load_spec
from coregular.invar import (
    InvariantTable,
    algebra_generators,
    brute_force_invariant_dim,
    contract_extend,
    decide_coregular,
    hilbert_ideal,
    hilbert_series_checks,
    is_hsop,
    molien_series,
    relative_hilbert_ideal,
    resolve_degree_bound,
    restriction_profile,
    subalgebra_dims,
)
from coregular.matrixgroup import close_group, decompose, fixed_space
from coregular.polyact import GradedBasis, is_invariant, variables

TAU = [[1, 0, 0], [0, 1, 0], [1, 0, 1]]
DELTA = [[1, 0, 0], [0, 2, 0], [0, 0, 1]]


def example_group():
    return close_group(2, 4, WORKED_EXAMPLE_GENERATORS)


def mixed_group():
    return close_group(3, 3, [TAU, DELTA])


def minus_identity():
    return close_group(5, 2, [[[4, 0], [0, 4]]])


class DegreeBoundTests(unittest.TestCase):
    def test_resolve_degree_bound(self):
        self.assertEqual(resolve_degree_bound(8, 4, None, 12), 12)
        self.assertEqual(resolve_degree_bound(2, 2, None, 12), 2)
        self.assertEqual(resolve_degree_bound(3, 2, None, None), 4)
        self.assertEqual(resolve_degree_bound(8, 4, 5, 12), 5)
        self.assertEqual(resolve_degree_bound(1, 3, None, 12), 1)
        with self.assertRaises(ValueError):
            resolve_degree_bound(8, 4, 0, 12)


class InvariantSpaceTests(unittest.TestCase):
    def test_minus_identity_dims(self):
        table = InvariantTable(minus_identity(), 4)
        self.assertEqual(table.series(), (1, 0, 3, 0, 5))
        self.assertEqual(table.hilbert_series, table.series(4))

    def test_kernel_dims_match_brute_force(self):
        group = mixed_group()
        table = InvariantTable(group, 4)
        for d in range(5):
            self.assertEqual(table.dim(d), brute_force_invariant_dim(group, d))

    def test_example_series(self):
        self.assertEqual(InvariantTable(example_group(), 4).series(), (1, 2, 3, 5, 9))


class GeneratorTests(unittest.TestCase):
    def test_algebra_generator_degrees(self):
        self.assertEqual([d for d, _ in algebra_generators(example_group(), 6)], [1, 1, 3, 4, 4])
        self.assertEqual([d for d, _ in algebra_generators(mixed_group(), 6)], [1, 2, 3])
        self.assertEqual([d for d, _ in algebra_generators(minus_identity(), 4)], [2, 2, 2])

    def test_hilbert_ideal(self):
        hilb = hilbert_ideal(example_group(), 6)
        self.assertEqual(hilb.generator_degrees, (1, 1, 4, 4))
        self.assertTrue(hilb.is_complete_intersection)

        not_ci = hilbert_ideal(minus_identity(), 4)
        self.assertEqual(not_ci.generator_degrees, (2, 2, 2))
        self.assertFalse(not_ci.is_complete_intersection)
        self.assertEqual(not_ci.per_degree_dims[:3], (0, 0, 3))

    def test_relative_hilbert_ideal(self):
        group = example_group()
        v_g = fixed_space(group)
        rel = relative_hilbert_ideal(group, v_g, 6)
        self.assertEqual(rel.min_generators, 2)
        self.assertEqual(rel.expected_codim, 2)
        self.assertTrue(rel.is_complete_intersection)
        with self.assertRaises(ValueError):
            relative_hilbert_ideal(group, Subspace.full(4, 2), 6)

    def test_hsop_and_subalgebra(self):
        x1, x2 = variables(2, 3)
        self.assertTrue(is_hsop([x1, x2 ** 2], 2, 3))
        self.assertFalse(is_hsop([x1, x1 * x2], 2, 3))
        self.assertFalse(is_hsop([x1], 2, 3))
        self.assertEqual(subalgebra_dims([x1, x2 ** 2], 2, 3, 4), (1, 1, 2, 2, 3))
        with self.assertRaises(ValueError):
            subalgebra_dims([x1 + 1], 2, 3, 2)

    def test_contract_extend_of_linear_invariants(self):
        group = example_group()
        table = InvariantTable(group, 5)
        result = contract_extend(group, table[1].basis, 5, table)
        self.assertFalse(result.equal)
        self.assertEqual(result.first_strict_degree, 3)
        self.assertEqual([g.degree for g in result.new_generators], [3])

        mixed = mixed_group()
        mixed_table = InvariantTable(mixed, 5)
        self.assertTrue(contract_extend(mixed, mixed_table[1].basis, 5, mixed_table).equal)

        x1, x2, x3 = variables(3, 3)
        with self.assertRaises(ValueError):
            contract_extend(mixed, [x2], 5, mixed_table)


def fixture_group(name):
    return load_spec(os.path.join(config.fixtures_dir(), name)).group()


def example_f3():
    x1, x2, x3, x4 = variables(4, 2)
    return x1 * x3 * (x1 + x3) + x2 * x4 * (x2 + x4)


class GeneratorMinimalityTests(unittest.TestCase):
    GROUPS = (
        "worked_example.json",
        "single_transvection_gf2.json",
        "transvection_gf3.json",
        "homology_gf3.json",
        "mixed_gf3.json",
        "scalar_gf5.json",
    )

    def test_generators_span_and_none_is_redundant(self):
        bound = 6
        for name in self.GROUPS:
            group = fixture_group(name)
            table = InvariantTable(group, bound)
            gens = [g for _, g in algebra_generators(group, bound, table)]
            full = subalgebra_dims(gens, group.n, group.p, bound)
            with self.subTest(group=name):
                self.assertEqual(full, table.series(bound))
                for i in range(len(gens)):
                    rest = gens[:i] + gens[i + 1:]
                    smaller = subalgebra_dims(rest, group.n, group.p, bound)
                    self.assertTrue(
                        any(a < b for a, b in zip(smaller, full)),
                        f"generator {gens[i]} can be dropped",
                    )

    def test_degree_three_generator_is_f3_modulo_x1_x2(self):
        group = example_group()
        f3 = example_f3()
        self.assertTrue(is_invariant(group, f3))
        g3 = [g for d, g in algebra_generators(group, 6) if d == 3]
        self.assertEqual(len(g3), 1)
        x1, x2 = variables(4, 2)[:2]
        binary = [x1 ** 3, x1 ** 2 * x2, x1 * x2 ** 2, x2 ** 3]
        self.assertFalse(GradedBasis.of(binary, 3, 4, 2).contains(g3[0]))
        self.assertTrue(GradedBasis.of(binary + [f3], 3, 4, 2).contains(g3[0]))

    def test_new_contracted_generator_is_f3_modulo_j(self):
        group = example_group()
        table = InvariantTable(group, 5)
        result = contract_extend(group, table[1].basis, 5, table)
        self.assertEqual(len(result.new_generators), 1)
        new = result.new_generators[0]
        x1, x2 = variables(4, 2)[:2]
        j3 = [x * h for x in (x1, x2) for h in table[2].basis]
        f3 = example_f3()
        self.assertFalse(GradedBasis.of(j3, 3, 4, 2).contains(new))
        self.assertTrue(GradedBasis.of(j3 + [f3], 3, 4, 2).contains(new))
        self.assertTrue(GradedBasis.of(j3 + [new], 3, 4, 2).contains(f3))

    def test_molien_matches_kernel_dims_for_order_six(self):
        group = close_group(7, 2, [[[3, 0], [0, 5]]])
        self.assertEqual(group.order, 6)
        self.assertEqual(molien_series(group, 8), InvariantTable(group, 8).series())


class VerdictTests(unittest.TestCase):
    def test_mixed_group_is_coregular(self):
        group = mixed_group()
        verdict = decide_coregular(group, 6, dsp_of(group))
        self.assertTrue(verdict.is_coregular)
        self.assertEqual(verdict.certificate, (1, 2, 3))
        self.assertIsNone(verdict.failure_witness)

    def test_example_fails_on_dsp(self):
        group = example_group()
        verdict = decide_coregular(group, 6, dsp_of(group))
        self.assertEqual(verdict.verdict, "not_coregular")
        self.assertEqual(verdict.failure_witness, "dsp")

    def test_minus_identity_fails_on_hilbert_ideal(self):
        group = minus_identity()
        verdict = decide_coregular(group, 4, dsp_of(group))
        self.assertEqual(verdict.failure_witness, "hilbert_ideal")
        self.assertEqual(verdict.as_dict()["route"], "hilbert_ci_and_dsp")


class SeriesTests(unittest.TestCase):
    def test_molien_series(self):
        self.assertEqual(molien_series(minus_identity(), 4), (1, 0, 3, 0, 5))
        homology = close_group(3, 2, [[[1, 0], [0, 2]]])
        self.assertEqual(molien_series(homology, 4), (1, 1, 2, 2, 3))
        with self.assertRaises(ValueError):
            molien_series(close_group(3, 2, [[[1, 0], [1, 1]]]), 4)

    def test_series_product_for_mixed_group(self):
        group = mixed_group()
        check = hilbert_series_checks(group, decompose(group), 6)
        self.assertTrue(check.holds)
        self.assertTrue(check.molien_matches)
        self.assertEqual(check.series_D, (1, 0, 1, 0, 1, 0, 1))
        self.assertEqual(check.series_G, check.product)


class RestrictionTests(unittest.TestCase):
    def test_restriction_of_example(self):
        group = example_group()
        profile = restriction_profile(group, fixed_space(group), 6)
        self.assertEqual(profile.generator_degrees, (4, 4))
        self.assertEqual(profile.subspace_dim, 2)

    def test_restriction_to_zero_subspace(self):
        group = minus_identity()
        profile = restriction_profile(group, fixed_space(group), 4)
        self.assertTrue(profile.is_polynomial)
        self.assertEqual(profile.image_dims, (1, 0, 0, 0, 0))


if __name__ == "__main__":
    unittest.main()
