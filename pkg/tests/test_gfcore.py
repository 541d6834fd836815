import unittest

import numpy as np

from coregular import gfcore
from coregular.gfcore import FieldElement, Subspace


class FieldTests(unittest.TestCase):
    def test_is_prime_and_check_modulus(self):
        self.assertTrue(gfcore.is_prime(2))
        self.assertTrue(gfcore.is_prime(2**31 - 1))
        self.assertFalse(gfcore.is_prime(1))
        self.assertFalse(gfcore.is_prime(91))
        self.assertFalse(gfcore.is_prime(True))
        with self.assertRaises(ValueError):
            gfcore.check_modulus(4)

    def test_inv_mod(self):
        self.assertEqual(gfcore.inv_mod(2, 5), 3)
        self.assertEqual(gfcore.inv_mod(-1, 7), 6)
        with self.assertRaises(ZeroDivisionError):
            gfcore.inv_mod(10, 5)

    def test_field_element_arithmetic(self):
        a = FieldElement.of(3, 5)
        self.assertEqual(int(a + 4), 2)
        self.assertEqual(int(gfcore.mul(a, FieldElement.of(4, 5))), 2)
        self.assertEqual(int(gfcore.inv(FieldElement.of(2, 5))), 3)
        self.assertEqual(int(gfcore.neg(a)), 2)
        self.assertEqual(int(a / 3), 1)
        self.assertEqual(int(a ** -1), 2)
        with self.assertRaises(ValueError):
            a + FieldElement.of(1, 7)
        with self.assertRaises(ValueError):
            FieldElement(5, 5)

    def test_primitive_root(self):
        self.assertEqual(gfcore.primitive_root(2), 1)
        self.assertEqual(gfcore.primitive_root(5), 2)
        self.assertEqual(gfcore.primitive_root(7), 3)


class MatrixTests(unittest.TestCase):
    def test_as_matrix_reduces_and_freezes(self):
        m = gfcore.as_matrix([[5, -1], [2, 3]], 3)
        self.assertEqual(m.tolist(), [[2, 2], [2, 0]])
        self.assertFalse(m.flags.writeable)
        with self.assertRaises(ValueError):
            gfcore.as_matrix([[1, 2], [3]], 5)

    def test_rref_gf2_known_matrix(self):
        result = gfcore.rref([[1, 1, 0], [1, 0, 1], [0, 1, 1]], 2)
        self.assertEqual(result.rank, 2)
        self.assertEqual(result.pivots, (0, 1))
        self.assertEqual(result.matrix.tolist(), [[1, 0, 1], [0, 1, 1], [0, 0, 0]])

    def test_rref_gf2_rows_span_the_input(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            mat = rng.integers(0, 2, size=(7, 13))
            reduced = gfcore.rref(mat, 2)
            echelon = reduced.matrix[: reduced.rank]
            self.assertEqual(len(gfcore.independent_rows(mat, 2)), reduced.rank)
            picked = gfcore.independent_rows(np.vstack([echelon, mat]), 2)
            self.assertEqual(picked, list(range(reduced.rank)))
            for row, col in enumerate(reduced.pivots):
                self.assertEqual(int(echelon[row, col]), 1)
                self.assertEqual(int(echelon[:, col].sum()), 1)

    def test_rref_odd_prime_uses_leading_ones(self):
        result = gfcore.rref([[2, 4], [1, 3]], 5)
        self.assertEqual(result.matrix.tolist(), [[1, 0], [0, 1]])
        self.assertEqual(gfcore.rank([[1, 2], [2, 4]], 5), 1)

    def test_inverse(self):
        self.assertEqual(gfcore.inverse([[1, 1], [0, 1]], 3).tolist(), [[1, 2], [0, 1]])
        with self.assertRaises(ValueError):
            gfcore.inverse([[1, 2], [2, 4]], 5)
        self.assertFalse(gfcore.is_invertible([[1, 1], [1, 1]], 2))

    def test_mat_mul_wide_modulus(self):
        p = 2**31 - 1
        a = np.array([[p - 1, p - 1]], dtype=np.int64)
        b = np.array([[p - 1], [p - 1]], dtype=np.int64)
        self.assertEqual(gfcore.mat_mul(a, b, p).tolist(), [[2]])

    def test_characteristic_polynomial(self):
        self.assertEqual(gfcore.characteristic_polynomial([[1, 1], [0, 1]], 2), (1, 0, 1))
        self.assertEqual(gfcore.characteristic_polynomial([[0, 1], [1, 0]], 3), (2, 0, 1))


class SubspaceTests(unittest.TestCase):
    def test_span_is_canonical(self):
        u = Subspace.span([[1, 1, 0], [0, 1, 1]], 3, 3)
        w = Subspace.span([[0, 1, 1], [1, 2, 1], [1, 1, 0]], 3, 3)
        self.assertEqual(u, w)
        self.assertEqual(hash(u), hash(w))
        self.assertEqual(u.dim, 2)
        self.assertEqual(u.codim, 1)

    def test_perp_sum_intersection(self):
        e1 = Subspace.span([[1, 0, 0]], 3, 3)
        e12 = Subspace.span([[1, 0, 0], [0, 1, 0]], 3, 3)
        e23 = Subspace.span([[0, 1, 0], [0, 0, 1]], 3, 3)
        self.assertEqual(e1.perp(), e23)
        self.assertEqual(gfcore.subspace_sum(e1, e23), Subspace.full(3, 3))
        self.assertEqual(gfcore.subspace_intersection(e12, e23), Subspace.span([[0, 1, 0]], 3, 3))
        self.assertTrue(gfcore.subspace_contains(e12, e1))
        self.assertFalse(e23.contains([1, 0, 0]))
        self.assertEqual(Subspace.zero(3, 3).perp(), Subspace.full(3, 3))
        with self.assertRaises(ValueError):
            e1 + Subspace.full(2, 3)

    def test_kernel_and_image(self):
        self.assertEqual(gfcore.kernel([[1, 1]], 2), Subspace.span([[1, 1]], 2, 2))
        self.assertEqual(gfcore.kernel([[1, 0], [0, 1]], 5).dim, 0)
        self.assertEqual(gfcore.image([[1, 2], [2, 4]], 5), Subspace.span([[1, 2]], 2, 5))

    def test_rank_solve(self):
        solved = gfcore.rank_solve([[1, 1], [0, 2]], 3, [2, 1])
        self.assertTrue(solved.consistent)
        self.assertEqual(((np.array([[1, 1], [0, 2]]) @ solved.solution) % 3).tolist(), [2, 1])

        stuck = gfcore.rank_solve([[1, 1], [1, 1]], 3, [1, 0])
        self.assertFalse(stuck.consistent)
        self.assertEqual(stuck.rank, 1)
        self.assertEqual(stuck.augmented_rank, 2)
        self.assertEqual(stuck.kernel.dim, 1)

    def test_independent_rows_respects_base(self):
        base = Subspace.span([[1, 0, 0]], 3, 5)
        rows = [[2, 0, 0], [1, 1, 0], [3, 3, 0], [0, 0, 4]]
        self.assertEqual(gfcore.independent_rows(rows, 5, base), [1, 3])
        self.assertEqual(gfcore.independent_rows(rows, 5), [0, 1, 3])
        self.assertEqual(gfcore.independent_rows(np.zeros((0, 3)), 5), [])


if __name__ == "__main__":
    unittest.main()
