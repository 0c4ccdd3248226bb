import itertools

from django.test import SimpleTestCase

from api.services.errors import CrossingPartition, NotAPairing, NotEvenBlocks
from api.services.nc_transforms import (
    fatten,
    hat,
    inverse_fatten,
    kreweras,
    kreweras_by_search,
    kreweras_inverse,
    nch_decompose,
    shift_left,
    shift_right,
    wreath,
)
from api.services.partitions import PartitionFamily, SetPartition, enumerate_partitions, is_leq, join

P = SetPartition.parse


class FatteningTests(SimpleTestCase):
    def test_small_fattenings(self):
        self.assertEqual(fatten(SetPartition.one(2)), P('{{1,4},{2,3}}'))
        self.assertEqual(fatten(SetPartition.zero(2)), P('{{1,2},{3,4}}'))
        self.assertEqual(fatten(P('{{1,3},{2}}')), P('{{1,6},{2,5},{3,4}}'))

    def test_worked_example(self):
        pi = P('{{1,4,5},{2,3},{6}}')
        self.assertEqual(fatten(pi), P('{{1,10},{2,7},{3,6},{4,5},{8,9},{11,12}}'))
        self.assertEqual(hat(pi), P('{{1,2,7,8,9,10},{3,4,5,6},{11,12}}'))
        self.assertEqual(inverse_fatten(fatten(pi)), pi)

    def test_inverse_fatten_round_trip(self):
        for k in range(1, 6):
            for pi in enumerate_partitions(PartitionFamily.NC, k):
                self.assertEqual(inverse_fatten(fatten(pi)), pi)

    def test_hat_is_join_with_fattened_bottom(self):
        floor = hat(SetPartition.zero(4))
        for pi in enumerate_partitions(PartitionFamily.NC, 4):
            self.assertEqual(join(fatten(pi), floor), hat(pi))

    def test_fatten_rejects_crossing(self):
        with self.assertRaises(CrossingPartition):
            fatten(P('{{1,3},{2,4}}'))

    def test_inverse_fatten_rejects_non_pairing(self):
        with self.assertRaises(NotAPairing):
            inverse_fatten(P('{{1,2,3,4}}'))


class ShiftAndWreathTests(SimpleTestCase):
    def test_shifts_are_inverse(self):
        pi = P('{{1,2},{3},{4,5}}')
        self.assertEqual(shift_right(shift_left(pi)), pi)
        self.assertEqual(shift_left(P('{{1,2},{3}}')), P('{{1,3},{2}}'))
        self.assertEqual(shift_right(P('{{1,2},{3}}')), P('{{1},{2,3}}'))

    def test_wreath(self):
        self.assertEqual(wreath(SetPartition.one(2), SetPartition.zero(2)), P('{{1,3},{2},{4}}'))


class KrewerasTests(SimpleTestCase):
    def test_worked_example(self):
        pi = P('{{1,5},{2,3,4},{6,8},{7}}')
        self.assertEqual(kreweras(pi), P('{{1,4},{2},{3},{5,8},{6,7}}'))
        self.assertEqual(kreweras_inverse(kreweras(pi)), pi)

    def test_extremes(self):
        for k in range(1, 6):
            self.assertEqual(kreweras(SetPartition.zero(k)), SetPartition.one(k))
            self.assertEqual(kreweras(SetPartition.one(k)), SetPartition.zero(k))

    def test_matches_search(self):
        for k in range(1, 6):
            for pi in enumerate_partitions(PartitionFamily.NC, k):
                with self.subTest(pi=str(pi)):
                    self.assertEqual(kreweras(pi), kreweras_by_search(pi))

    def test_inverse_and_block_count(self):
        for pi in enumerate_partitions(PartitionFamily.NC, 6):
            complement = kreweras(pi)
            self.assertEqual(kreweras_inverse(complement), pi)
            self.assertEqual(pi.block_count + complement.block_count, 7)

    def test_fattening_intertwines_with_shift(self):
        for pi in enumerate_partitions(PartitionFamily.NC, 5):
            self.assertEqual(fatten(kreweras(pi)), shift_left(fatten(pi)))

    def test_complement_of_fattened_top(self):
        self.assertEqual(kreweras(fatten(SetPartition.one(2))), P('{{1,3},{2},{4}}'))


class EvenBlockDecompositionTests(SimpleTestCase):
    def test_round_trip_over_ordered_pairs(self):
        members = enumerate_partitions(PartitionFamily.NC, 4)
        for sigma, pi in itertools.product(members, repeat=2):
            if not is_leq(sigma, pi):
                continue
            tau = join(fatten(sigma), fatten(pi))
            self.assertTrue(PartitionFamily.NCH.contains(tau))
            self.assertEqual(kreweras(tau), wreath(sigma, kreweras(pi)))
            self.assertEqual(nch_decompose(tau), (sigma, pi))

    def test_top_of_four_points(self):
        self.assertEqual(nch_decompose(SetPartition.one(4)), (SetPartition.zero(2), SetPartition.one(2)))

    def test_fattened_partition_decomposes_into_itself(self):
        for sigma in enumerate_partitions(PartitionFamily.NC, 4):
            self.assertEqual(nch_decompose(fatten(sigma)), (sigma, sigma))

    def test_every_even_partition_decomposes(self):
        for tau in enumerate_partitions(PartitionFamily.NCH, 6):
            first, second = nch_decompose(tau)
            self.assertTrue(is_leq(first, second))
            self.assertEqual(join(fatten(first), fatten(second)), tau)

    def test_rejects_odd_blocks(self):
        with self.assertRaises(NotEvenBlocks):
            nch_decompose(P('{{1,2,3},{4}}'))
