from fractions import Fraction

from django.test import SimpleTestCase, override_settings

from api.services import codec, families
from api.services.errors import MalformedInput
from api.services.infdiv import verify_divisibility_equivalence
from api.services.invariance import invariance_check, kernel_moments, moment_array
from api.services.opval import BaseAlgebra
from api.services.partitions import SetPartition
from api.services.weingarten import weingarten


class RationalTests(SimpleTestCase):
    def test_format(self):
        self.assertEqual(codec.format_rational(Fraction(-2, 40)), '-1/20')
        self.assertEqual(codec.format_rational(3), '3')

    def test_parse(self):
        self.assertEqual(codec.parse_rational('-1/20'), Fraction(-1, 20))
        self.assertEqual(codec.parse_rational(' 4 '), 4)
        self.assertEqual(codec.parse_rational(7), 7)

    def test_parse_rejects_garbage(self):
        for value in ['1/0', 'x', True, None]:
            with self.subTest(value=value):
                with self.assertRaises(MalformedInput):
                    codec.parse_rational(value)


class ElementTests(SimpleTestCase):
    def test_element(self):
        algebra = BaseAlgebra(2)
        rows = codec.format_element(algebra.element([[1, Fraction(1, 2)], [0, -3]]))
        self.assertEqual(rows, [['1', '1/2'], ['0', '-3']])
        self.assertEqual(codec.parse_element(rows, algebra)[0, 1], Fraction(1, 2))
        with self.assertRaises(MalformedInput):
            codec.parse_element([['1']], algebra)


class DistributionTests(SimpleTestCase):
    def test_distribution(self):
        spec = families.free_poisson(2, 2)
        data = codec.distribution_to_json(spec)
        self.assertEqual(data['d'], 2)
        self.assertEqual(data['entries'][0], {'word': [0], 'interior': [], 'value': [['1', '0'], ['0', '1']]})
        self.assertEqual(codec.distribution_from_json(data), spec)

    def test_duplicate_entries(self):
        data = {'d': 1, 's': 1, 'K': 2, 'entries': [
            {'word': [0], 'interior': [], 'value': [['1']]},
            {'word': [0], 'value': [['2']]},
        ]}
        with self.assertRaises(MalformedInput):
            codec.distribution_from_json(data)

    def test_family(self):
        family = families.index_dependent_rcyclic(2, 2)
        data = codec.family_to_json(family)
        self.assertEqual(data['n'], 2)
        self.assertIn({'letters': [[2, 1, 0], [1, 2, 0]], 'interior': [0], 'value': [['5']]}, data['entries'])
        restored = codec.family_from_json(data)
        self.assertEqual(restored.distribution, family.distribution)

    def test_family_rejects_outside_letters(self):
        data = {'n': 2, 'd': 1, 's': 1, 'K': 2, 'entries': [{'letters': [[3, 1, 0]], 'value': [['1']]}]}
        with self.assertRaises(MalformedInput):
            codec.family_from_json(data)


class MomentTests(SimpleTestCase):
    def test_compressed_moments(self):
        moments = kernel_moments(families.semicircular(1, 2), 2).at(2)
        data = codec.moments_to_json(moments)
        self.assertTrue(data['compressed'])
        self.assertIn({'word': [0, 0], 'value': '1', 'pattern': '{{1,4},{2,3}}'}, data['entries'])
        restored = codec.moments_from_json(data)
        self.assertEqual(restored.kernel_function((0, 0)), moments.kernel_function((0, 0)))

    def test_expanded_moments(self):
        moments = moment_array(families.uniform_semicircular(2, 1, 1), 1)
        data = codec.moments_to_json(moments)
        self.assertFalse(data['compressed'])
        self.assertEqual(len(data['entries']), 4)
        self.assertEqual(data['entries'][0], {'word': [0], 'value': '0', 'indices': [1, 1]})
        self.assertEqual(codec.moments_from_json(data).value((0,), (2, 1)), 0)


@override_settings(FREECALC_N_JOBS=1)
class ResultTests(SimpleTestCase):
    def test_certificate(self):
        certificate = invariance_check(kernel_moments(families.semicircular(1, 2), 2).at(4), 'o+')
        data = codec.certificate_to_json(certificate)
        self.assertEqual(data['group'], 'o+')
        self.assertTrue(data['consistent'])
        second = data['systems'][1]
        self.assertEqual(second['coefficients'], [{'pattern': '{{1,4},{2,3}}', 'value': '1'}])
        self.assertFalse(second['dependent'])

    def test_failed_certificate_has_witness(self):
        moments = moment_array(families.symmetric_semicircular(4, 2), 2, compressed=True)
        data = codec.certificate_to_json(invariance_check(moments, 's+'))
        self.assertFalse(data['consistent'])
        self.assertEqual(len(data['systems'][1]['witness']), 4)

    def test_matrix(self):
        data = codec.matrix_to_json(weingarten('o+', 4, 3))
        self.assertEqual(data['order'], ['{{1,2},{3,4}}', '{{1,4},{2,3}}'])
        self.assertEqual(data['rows'][0], ['1/8', '-1/24'])

    def test_divisibility(self):
        data = codec.divisibility_to_json(verify_divisibility_equivalence(families.semicircular(1, 2), 2))
        self.assertTrue(data['passed'])
        self.assertEqual(len(data['rows']), 6)
        self.assertIn('Positivity', data['note'])

    def test_partition(self):
        self.assertEqual(codec.parse_partition(codec.format_partition(SetPartition.one(3))), SetPartition.one(3))
