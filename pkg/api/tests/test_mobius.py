import itertools
from fractions import Fraction

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from api.services.errors import CrossingPartition, SizeMismatch
from api.services.mobius import mobius, mobius_inversion_check, mobius_transform, zeta_transform
from api.services.nc_transforms import hat, nch_decompose
from api.services.partitions import PartitionFamily, SetPartition, catalan, enumerate_partitions, is_leq

P = SetPartition.parse


class MobiusFunctionTests(SimpleTestCase):
    def test_bottom_to_top(self):
        for k in range(1, 8):
            with self.subTest(k=k):
                expected = (-1) ** (k - 1) * catalan(k - 1)
                self.assertEqual(mobius(SetPartition.zero(k), SetPartition.one(k)), expected)

    def test_small_values(self):
        self.assertEqual(mobius(SetPartition.zero(3), P('{{1,2},{3}}')), -1)
        self.assertEqual(mobius(P('{{1,2},{3}}'), P('{{1,2},{3}}')), 1)
        self.assertEqual(mobius(P('{{1,2},{3}}'), P('{{1},{2,3}}')), 0)

    def test_delta_relation(self):
        lattice = enumerate_partitions(PartitionFamily.NC, 4)
        for sigma in lattice:
            for pi in lattice:
                total = sum(mobius(sigma, tau) for tau in lattice if is_leq(sigma, tau) and is_leq(tau, pi))
                self.assertEqual(total, int(sigma == pi) if is_leq(sigma, pi) else 0)

    def test_hat_preserves_mobius(self):
        for k in range(1, 6):
            lattice = enumerate_partitions(PartitionFamily.NC, k)
            failures = [
                (sigma, pi) for sigma, pi in itertools.product(lattice, repeat=2)
                if is_leq(sigma, pi) and mobius(hat(sigma), hat(pi)) != mobius(sigma, pi)
            ]
            self.assertEqual(failures, [], f"k={k}")

    def test_even_block_intervals_factor(self):
        for k in range(1, 5):
            even = enumerate_partitions(PartitionFamily.NCH, 2 * k)
            parts = {tau: nch_decompose(tau) for tau in even}
            for lower, upper in itertools.product(even, repeat=2):
                (p1, p2), (s1, s2) = parts[lower], parts[upper]
                below = is_leq(lower, upper)
                self.assertEqual(below, is_leq(s1, p1) and is_leq(p2, s2), f"{lower} <= {upper}")
                if below:
                    self.assertEqual(mobius(lower, upper), mobius(s1, p1) * mobius(p2, s2), f"{lower} <= {upper}")

    def test_rejects_bad_input(self):
        with self.assertRaises(SizeMismatch):
            mobius(SetPartition.zero(2), SetPartition.one(3))
        with self.assertRaises(CrossingPartition):
            mobius(SetPartition.zero(4), P('{{1,3},{2,4}}'))


class InversionTests(SimpleTestCase):
    @given(st.lists(st.integers(min_value=-5, max_value=5), min_size=14, max_size=14))
    @settings(max_examples=25, deadline=None)
    def test_zeta_then_mobius_is_identity(self, values):
        lattice = enumerate_partitions(PartitionFamily.NC, 4)
        f = {pi: Fraction(value) for pi, value in zip(lattice, values)}
        g = zeta_transform(f, 4)
        self.assertEqual(mobius_transform(g, 4), f)
        self.assertTrue(mobius_inversion_check(f, g, 4))

    def test_check_detects_mismatch(self):
        lattice = enumerate_partitions(PartitionFamily.NC, 3)
        f = {pi: Fraction(1) for pi in lattice}
        g = {pi: Fraction(1) for pi in lattice}
        self.assertFalse(mobius_inversion_check(f, g, 3))

    def test_check_requires_total_maps(self):
        with self.assertRaises(SizeMismatch):
            mobius_inversion_check({}, {}, 2)
