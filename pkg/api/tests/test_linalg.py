from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from api.services.linalg import SingularMatrix, identity, inverse, rank, solve

F = Fraction


def _matrix(rows):
    return np.array([[F(value) for value in row] for row in rows], dtype=object)


class RankTests(SimpleTestCase):
    def test_rank(self):
        self.assertEqual(rank(_matrix([[1, 2], [2, 4]])), 1)
        self.assertEqual(rank(_matrix([[1, 2], [3, 4]])), 2)
        self.assertEqual(rank(np.empty((0, 3), dtype=object)), 0)

    def test_rank_with_fractions(self):
        self.assertEqual(rank(_matrix([[F(1, 2), F(1, 3)], [F(3, 2), 1]])), 1)


class SolveTests(SimpleTestCase):
    def test_unique_solution(self):
        solution = solve(_matrix([[2, 1], [1, 3]]), [F(3), F(5)])
        self.assertEqual(list(solution.values[:, 0]), [F(4, 5), F(7, 5)])
        self.assertEqual(solution.rank, 2)
        self.assertIsNone(solution.inconsistent_row)

    def test_inconsistent_system_names_a_row(self):
        solution = solve(_matrix([[1, 1], [2, 2], [0, 1]]), [F(1), F(3), F(0)])
        self.assertIsNone(solution.values)
        self.assertIn(solution.inconsistent_row, (0, 1))

    def test_underdetermined_sets_free_unknowns_to_zero(self):
        solution = solve(_matrix([[1, 1, 0]]), [F(2)])
        self.assertEqual(list(solution.values[:, 0]), [F(2), F(0), F(0)])
        self.assertEqual(solution.pivots, [0])

    def test_shape_mismatch(self):
        with self.assertRaises(ValueError):
            solve(_matrix([[1, 0], [0, 1]]), [F(1)])


class InverseTests(SimpleTestCase):
    def test_inverse(self):
        matrix = _matrix([[4, 2], [2, 4]])
        self.assertTrue((inverse(matrix).dot(matrix) == identity(2)).all())
        self.assertEqual(inverse(matrix)[0, 1], F(-1, 6))

    def test_singular(self):
        with self.assertRaises(SingularMatrix):
            inverse(_matrix([[1, 1], [1, 1]]))

    @given(st.lists(st.integers(min_value=-4, max_value=4), min_size=9, max_size=9))
    @settings(max_examples=40, deadline=None)
    def test_inverse_is_exact(self, values):
        matrix = _matrix([values[0:3], values[3:6], values[6:9]])
        if rank(matrix) < 3:
            with self.assertRaises(SingularMatrix):
                inverse(matrix)
            return
        self.assertTrue((matrix.dot(inverse(matrix)) == identity(3)).all())
