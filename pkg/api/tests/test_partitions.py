from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from api.services.errors import CrossingPartition, MalformedInput, SizeMismatch
from api.services.partitions import (
    PartitionFamily,
    SetPartition,
    catalan,
    enumerate_partitions,
    interval_blocks,
    is_leq,
    is_noncrossing,
    join,
    kernel,
    meet,
    require_noncrossing,
    restrict,
)

P = SetPartition.parse

labels = st.lists(st.integers(min_value=0, max_value=3), min_size=1, max_size=7)


class SetPartitionTests(SimpleTestCase):
    def test_parse_and_format(self):
        pi = P('{{1,4,5},{2,3},{6}}')
        self.assertEqual(pi.rgs, (0, 1, 1, 0, 0, 2))
        self.assertEqual(str(pi), '{{1,4,5},{2,3},{6}}')
        self.assertEqual(pi.block_count, 3)
        self.assertEqual(pi.block_sizes(), [3, 2, 1])

    def test_parse_normalises_block_order(self):
        self.assertEqual(P('{{3},{2,1}}'), P('{{1,2},{3}}'))

    def test_empty_partition(self):
        empty = P('{}')
        self.assertEqual(empty.k, 0)
        self.assertEqual(empty.block_count, 0)
        self.assertEqual(str(empty), '{}')

    def test_rejects_malformed_text(self):
        for text in ['{{1,2}', '{1,2}', '{{1,a}}', '{{1},{1,2}}', '{{1},{3}}']:
            with self.subTest(text=text):
                with self.assertRaises(MalformedInput):
                    P(text)

    def test_rejects_bad_rgs(self):
        with self.assertRaises(MalformedInput):
            SetPartition((0, 2))

    def test_zero_and_one(self):
        self.assertEqual(str(SetPartition.zero(3)), '{{1},{2},{3}}')
        self.assertEqual(str(SetPartition.one(3)), '{{1,2,3}}')


class LatticeTests(SimpleTestCase):
    def test_kernel(self):
        self.assertEqual(kernel([7, 3, 7, 3, 5]), P('{{1,3},{2,4},{5}}'))

    def test_join_and_meet(self):
        pi = P('{{1,2},{3},{4}}')
        sigma = P('{{1},{2,3},{4}}')
        self.assertEqual(join(pi, sigma), P('{{1,2,3},{4}}'))
        self.assertEqual(meet(pi, sigma), SetPartition.zero(4))

    def test_order(self):
        self.assertTrue(is_leq(P('{{1},{2},{3}}'), P('{{1,3},{2}}')))
        self.assertTrue(is_leq(P('{{1,3},{2}}'), P('{{1,2,3}}')))
        self.assertFalse(is_leq(P('{{1,2},{3}}'), P('{{1,3},{2}}')))

    def test_size_mismatch(self):
        with self.assertRaises(SizeMismatch):
            join(SetPartition.one(2), SetPartition.one(3))

    @given(labels, labels)
    @settings(max_examples=60, deadline=None)
    def test_meet_below_join(self, first, second):
        size = min(len(first), len(second))
        pi, sigma = kernel(first[:size]), kernel(second[:size])
        self.assertTrue(is_leq(meet(pi, sigma), pi))
        self.assertTrue(is_leq(pi, join(pi, sigma)))
        self.assertTrue(is_leq(sigma, join(pi, sigma)))

    def test_restrict(self):
        pi = P('{{1,4},{2,3},{5}}')
        self.assertEqual(restrict(pi, [2, 4, 5]), P('{{1},{2},{3}}'))
        self.assertEqual(restrict(pi, [1, 3, 4]), P('{{1,3},{2}}'))

    def test_interval_blocks(self):
        self.assertEqual(interval_blocks(P('{{1,4},{2,3},{5}}')), [(2, 3), (5,)])


class NoncrossingTests(SimpleTestCase):
    def test_crossing_detection(self):
        self.assertFalse(is_noncrossing(P('{{1,3},{2,4}}')))
        self.assertTrue(is_noncrossing(P('{{1,4},{2,3}}')))
        self.assertFalse(is_noncrossing(P('{{1,3,5},{2,6},{4}}')))
        with self.assertRaises(CrossingPartition):
            require_noncrossing(P('{{1,3},{2,4}}'))

    def test_family_counts(self):
        expected = {
            PartitionFamily.ALL: [1, 1, 2, 5, 15, 52, 203],
            PartitionFamily.NC: [catalan(k) for k in range(7)],
            PartitionFamily.NC2: [1, 0, 1, 0, 2, 0, 5],
            PartitionFamily.NCH: [1, 0, 1, 0, 3, 0, 12],
            PartitionFamily.NCB: [1, 1, 2, 4, 9, 21, 51],
        }
        for family, counts in expected.items():
            for k, count in enumerate(counts):
                with self.subTest(family=family, k=k):
                    self.assertEqual(len(enumerate_partitions(family, k)), count)

    def test_enumeration_is_lexicographic_and_in_family(self):
        for family in PartitionFamily:
            partitions = enumerate_partitions(family, 5)
            self.assertEqual([pi.rgs for pi in partitions], sorted(pi.rgs for pi in partitions))
            self.assertTrue(all(family.contains(pi) for pi in partitions))

    def test_nc_matches_filtered_all(self):
        everything = enumerate_partitions(PartitionFamily.ALL, 6)
        self.assertEqual(
            enumerate_partitions(PartitionFamily.NC, 6),
            [pi for pi in everything if is_noncrossing(pi)],
        )

    def test_family_parse(self):
        self.assertIs(PartitionFamily.parse('NC2'), PartitionFamily.NC2)
        self.assertIs(PartitionFamily.parse('nch'), PartitionFamily.NCH)
        with self.assertRaises(MalformedInput):
            PartitionFamily.parse('np')

    def test_negative_k(self):
        with self.assertRaises(MalformedInput):
            enumerate_partitions(PartitionFamily.NC, -1)
