from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase

from api.services import families
from api.services.errors import MalformedInput, SizeMismatch, TruncationExceeded
from api.services.matrix_models import (
    MNB,
    OVER_B,
    OVER_D,
    MatrixFamilySpec,
    MatrixWord,
    adjoin_diagonal,
    bimodule_transform,
    cumulant_factor_identity,
    cyclic_cumulant_identity,
    cyclic_letters,
    determining_series,
    embed,
    expectation,
    find_freeness_violation,
    freeness_from_mnb_over_b,
    freeness_from_mnb_over_d,
    is_rcyclic,
    is_uniformly_rcyclic,
    matrix_cumulants,
    product_family,
    project,
    unit_block,
)
from api.services.opval import BaseAlgebra


def scalar(value):
    return BaseAlgebra(1).scalar(value)


class LayoutTests(SimpleTestCase):
    def test_generator_numbering(self):
        family = MatrixFamilySpec(3, 2, BaseAlgebra(1), 2)
        self.assertEqual(family.generator(1, 1, 0), 0)
        self.assertEqual(family.generator(2, 3, 1), 9 + 5)
        for g in range(18):
            self.assertEqual(family.generator(*family.entry(g)), g)

    def test_involution_is_lifted(self):
        family = MatrixFamilySpec(2, 2, BaseAlgebra(1), 2, involution=(1, 0))
        self.assertEqual(family.distribution.involution[family.generator(1, 2, 0)], family.generator(2, 1, 1))

    def test_from_distribution_checks_size(self):
        with self.assertRaises(SizeMismatch):
            MatrixFamilySpec.from_distribution(2, 1, families.semicircular())

    def test_cyclic_letters(self):
        self.assertEqual(cyclic_letters((1, 2, 3)), [(3, 1), (1, 2), (2, 3)])

    def test_projection(self):
        matrix = np.array([[Fraction(1), Fraction(5)], [Fraction(7), Fraction(3)]], dtype=object)
        self.assertEqual(project(matrix, OVER_B, 2, 1)[0, 0], 2)
        self.assertEqual(project(matrix, OVER_D, 2, 1)[0, 1], 0)
        with self.assertRaises(MalformedInput):
            project(matrix, 'C', 2, 1)


class RCyclicTests(SimpleTestCase):
    def test_suite_family_flags(self):
        for name, build, rcyclic, uniform in families.SUITE_FAMILIES:
            family = build(2, 3)
            with self.subTest(family=name):
                self.assertEqual(is_rcyclic(family), rcyclic)
                self.assertEqual(is_uniformly_rcyclic(family), uniform)

    def test_first_order_truncation_builds(self):
        builds = [
            families.semicircular(1, 1),
            families.semicircular(2, 1),
            families.scaled_semicircular(2, 1),
            families.semicircular_pair([[1, 0], [0, 1]], 1),
            families.free_poisson(1, 1),
        ]
        for spec in builds:
            with self.subTest(spec=spec):
                self.assertEqual(spec.K, 1)
        self.assertEqual(families.free_poisson(1, 1).basis_value((0,), ())[0, 0], 1)
        self.assertEqual(families.semicircular(1, 1).basis_value((0,), ())[0, 0], 0)
        for name, build, _, _ in families.SUITE_FAMILIES:
            with self.subTest(family=name):
                self.assertEqual(build(2, 1).K, 1)

    def test_determining_series(self):
        series = determining_series(families.index_dependent_rcyclic(2))
        self.assertEqual(series.value((0, 0), (1, 2), (0,))[0, 0], 5)
        self.assertEqual(series.value((0, 0), (2, 2), (0,))[0, 0], 6)
        self.assertEqual(series.value((0,), (1,), ())[0, 0], 0)


class ExpectationTests(SimpleTestCase):
    def test_second_moment_of_uniform_semicircular(self):
        n = 3
        family = families.uniform_semicircular(n, 1, 4)
        word = MatrixWord.parse([0, 0], n, 1)
        self.assertEqual(expectation(family, OVER_B, word)[0, 0], n)
        self.assertTrue((expectation(family, MNB, word) == embed(scalar(n), n)).all())

    def test_constants_between_letters(self):
        n = 2
        family = families.uniform_semicircular(n, 1, 4)
        word = MatrixWord.parse([0, unit_block(n, 1, 1, scalar(1)), 0], n, 1)
        value = expectation(family, MNB, word)
        self.assertEqual(value[0, 0], 1)
        self.assertEqual(value[1, 1], 1)
        self.assertEqual(value[0, 1], 0)

    def test_word_product(self):
        n = 2
        left = MatrixWord.parse([0], n, 1)
        right = MatrixWord.parse([unit_block(n, 2, 2, scalar(3)), 0], n, 1)
        product = left @ right
        self.assertEqual(len(product), 2)
        self.assertEqual(product.letters[0][1][1, 1], 3)

    def test_truncation(self):
        family = families.uniform_semicircular(2, 1, 2)
        with self.assertRaises(TruncationExceeded):
            expectation(family, OVER_B, MatrixWord.parse([0, 0, 0], 2, 1))

    def test_cumulants_over_b_of_uniform_semicircular(self):
        n = 2
        family = families.uniform_semicircular(n, 1, 4)
        one = embed(scalar(1), n)
        self.assertEqual(matrix_cumulants(family, OVER_B, [(0, one), (0, one)])[0, 0], n)
        self.assertEqual(matrix_cumulants(family, OVER_B, [(0, one)] * 4)[0, 0], 0)
        with self.assertRaises(MalformedInput):
            matrix_cumulants(family, MNB, [(0, one)])


class CumulantIdentityTests(SimpleTestCase):
    def test_cyclic_identity_for_rcyclic_family(self):
        family = families.index_dependent_rcyclic(2, 3)
        one = scalar(1)
        for rword, iword in [((0, 0), (1,)), ((0, 0), (2,)), ((0, 0, 0), (1, 2))]:
            left, right = cyclic_cumulant_identity(family, rword, iword, [one] * len(rword))
            self.assertTrue(np.array_equal(left, right))

    def test_factor_identity_for_uniform_family(self):
        family = families.uniform_free_poisson(2, 3)
        one = scalar(1)
        for k in range(1, 4):
            left, right = cumulant_factor_identity(family, (0,) * k, [one] * k)
            self.assertTrue(np.array_equal(left, right))


class FreenessTests(SimpleTestCase):
    def test_uniform_semicircular_is_free_over_b(self):
        family = families.uniform_semicircular(2, 1, 2)
        self.assertTrue(freeness_from_mnb_over_d(family))
        self.assertTrue(freeness_from_mnb_over_b(family))

    def test_diagonal_family_is_free_over_d_only(self):
        family = families.diagonal_iid(2, 2)
        self.assertTrue(freeness_from_mnb_over_d(family))
        self.assertFalse(freeness_from_mnb_over_b(family))

    def test_symmetric_family_is_not_free_over_d(self):
        violation = find_freeness_violation(families.symmetric_semicircular(2, 2), OVER_D)
        self.assertIsNotNone(violation)
        self.assertIn('lengths', violation)

    def test_rejects_other_targets(self):
        with self.assertRaises(MalformedInput):
            find_freeness_violation(families.zero_family(2, 2), MNB)


class ConstructionTests(SimpleTestCase):
    def test_square_of_uniform_semicircular(self):
        family = product_family(families.uniform_semicircular(2, 1, 4), [(0, 0)])
        self.assertEqual(family.K, 2)
        self.assertEqual(family.distribution.basis_value((family.generator(1, 1, 0),), ())[0, 0], 2)
        self.assertEqual(family.distribution.basis_value((family.generator(1, 2, 0),), ())[0, 0], 0)

    def test_product_needs_order_two(self):
        with self.assertRaises(TruncationExceeded):
            product_family(families.uniform_semicircular(2, 1, 1), [(0, 0)])

    def test_adjoin_diagonal(self):
        family = adjoin_diagonal(families.uniform_semicircular(2, 1, 2), [scalar(1), scalar(0)])
        self.assertEqual(family.s, 2)
        self.assertEqual(family.distribution.basis_value((family.generator(1, 1, 1),), ())[0, 0], 1)
        self.assertEqual(family.distribution.basis_value((family.generator(2, 2, 1),), ())[0, 0], 0)
        with self.assertRaises(SizeMismatch):
            adjoin_diagonal(families.uniform_semicircular(2, 1, 2), [scalar(1)])

    def test_shift_by_diagonal(self):
        one = scalar(1)
        shifted = bimodule_transform(
            families.uniform_semicircular(2, 1, 4), [one, one], [one, one], [scalar(1), scalar(2)]
        )
        self.assertEqual(shifted.distribution, families.shifted_diagonal(2, 4).distribution)

    def test_scaling_by_diagonal(self):
        family = bimodule_transform(families.uniform_semicircular(2, 1, 2), [scalar(2), scalar(1)], [scalar(1), scalar(3)])
        g, h = family.generator(1, 2, 0), family.generator(2, 1, 0)
        # y_12 = 2 x_12 3, y_21 = x_21
        self.assertEqual(family.distribution.basis_value((g, h), (0,))[0, 0], 6)
