"""
Set partitions of {1,...,k} and the noncrossing families built on them.

A partition is stored by its restricted-growth string (RGS): position i
carries the index of its block, blocks numbered in order of first
appearance. The RGS is the canonical key, the hash, and the enumeration
order (lexicographic), so every table indexed by partitions in this
package uses the same row order.
"""
import enum
import logging
import math
import re
from functools import lru_cache

from .errors import CrossingPartition, MalformedInput, SizeMismatch

logger = logging.getLogger(__name__)


class DisjointSet:
    """
    Union-find over hashable elements with path compression and union by rank.
    """

    __slots__ = ('_parent', '_rank')

    def __init__(self, elements=()):
        self._parent = {}
        self._rank = {}
        for element in elements:
            self.add(element)

    def add(self, element):
        if element not in self._parent:
            self._parent[element] = element
            self._rank[element] = 0

    def find_root(self, element):
        root = element
        while self._parent[root] != root:
            root = self._parent[root]
        # Path compression
        while self._parent[element] != root:
            self._parent[element], element = root, self._parent[element]
        return root

    def union(self, first, second):
        first_root = self.find_root(first)
        second_root = self.find_root(second)
        if first_root == second_root:
            return first_root
        if self._rank[first_root] < self._rank[second_root]:
            first_root, second_root = second_root, first_root
        self._parent[second_root] = first_root
        if self._rank[first_root] == self._rank[second_root]:
            self._rank[first_root] += 1
        return first_root

    def is_connected(self, first, second):
        return self.find_root(first) == self.find_root(second)


class SetPartition:
    """
    Immutable partition of {1,...,k}.

    Construct from blocks (``SetPartition.from_blocks``), from labels
    (``kernel``), from text (``SetPartition.parse``) or directly from a
    restricted-growth string.
    """

    __slots__ = ('_rgs', '_blocks')

    def __init__(self, rgs):
        rgs = tuple(int(label) for label in rgs)
        top = -1
        for label in rgs:
            if label < 0 or label > top + 1:
                raise MalformedInput(f"{rgs} is not a restricted-growth string")
            top = max(top, label)
        self._rgs = rgs
        self._blocks = None

    @classmethod
    def from_blocks(cls, blocks, k=None):
        blocks = [sorted(int(point) for point in block) for block in blocks]
        points = [point for block in blocks for point in block]
        if k is None:
            k = max(points, default=0)
        if any(not block for block in blocks):
            raise MalformedInput("blocks must be nonempty")
        if sorted(points) != list(range(1, k + 1)):
            raise MalformedInput(f"blocks {blocks} do not partition 1..{k}")
        labels = [0] * k
        for index, block in enumerate(blocks):
            for point in block:
                labels[point - 1] = index
        return kernel(labels) if k else cls(())

    @classmethod
    def parse(cls, text):
        """
        Read the shared textual syntax, e.g. ``{{1,4,5},{2,3},{6}}``.
        """
        text = text.strip()
        if not (text.startswith('{') and text.endswith('}')):
            raise MalformedInput(f"cannot parse partition {text!r}")
        inner = text[1:-1].strip()
        if not inner:
            return cls(())
        blocks = []
        for chunk in re.findall(r'\{([^{}]*)\}', inner):
            try:
                blocks.append([int(part) for part in chunk.split(',') if part.strip()])
            except ValueError:
                raise MalformedInput(f"cannot parse partition {text!r}")
        if re.sub(r'\{[^{}]*\}', '', inner).replace(',', '').strip():
            raise MalformedInput(f"cannot parse partition {text!r}")
        return cls.from_blocks(blocks)

    @classmethod
    def zero(cls, k):
        return cls(range(k))

    @classmethod
    def one(cls, k):
        return cls([0] * k)

    @property
    def k(self):
        return len(self._rgs)

    @property
    def rgs(self):
        return self._rgs

    @property
    def blocks(self):
        if self._blocks is None:
            grouped = {}
            for position, label in enumerate(self._rgs, start=1):
                grouped.setdefault(label, []).append(position)
            self._blocks = tuple(tuple(grouped[label]) for label in sorted(grouped))
        return self._blocks

    @property
    def block_count(self):
        return max(self._rgs) + 1 if self._rgs else 0

    def block_sizes(self):
        return [len(block) for block in self.blocks]

    def __eq__(self, other):
        if not isinstance(other, SetPartition):
            return NotImplemented
        return self._rgs == other._rgs

    def __lt__(self, other):
        return (self.k, self._rgs) < (other.k, other._rgs)

    def __hash__(self):
        return hash(self._rgs)

    def __str__(self):
        return '{' + ','.join('{' + ','.join(map(str, block)) + '}' for block in self.blocks) + '}'

    def __repr__(self):
        return f"SetPartition('{self}')"

    def __reduce__(self):
        return (SetPartition, (self._rgs,))


class PartitionFamily(enum.Enum):
    ALL = 'all'
    NC = 'nc'
    NC2 = 'nc2'
    NCH = 'nch'
    NCB = 'ncb'

    @classmethod
    def parse(cls, text):
        try:
            return cls(text.lower())
        except ValueError:
            try:
                return cls[text.upper()]
            except KeyError:
                raise MalformedInput(f"unknown partition family {text!r}")

    def contains(self, pi):
        if self is PartitionFamily.ALL:
            return True
        if not is_noncrossing(pi):
            return False
        sizes = pi.block_sizes()
        if self is PartitionFamily.NC2:
            return all(size == 2 for size in sizes)
        if self is PartitionFamily.NCH:
            return all(size % 2 == 0 for size in sizes)
        if self is PartitionFamily.NCB:
            return all(size <= 2 for size in sizes)
        return True


def _check_same_size(pi, sigma):
    if pi.k != sigma.k:
        raise SizeMismatch(f"partitions of {pi.k} and {sigma.k} points")


def catalan(k):
    return math.comb(2 * k, k) // (k + 1)


def kernel(indices):
    """
    ker i: positions share a block iff their labels are equal.
    """
    seen = {}
    labels = []
    for label in indices:
        labels.append(seen.setdefault(label, len(seen)))
    return SetPartition(labels)


def join(pi, sigma):
    _check_same_size(pi, sigma)
    components = DisjointSet(range(pi.k))
    for partition in (pi, sigma):
        for block in partition.blocks:
            for point in block[1:]:
                components.union(block[0] - 1, point - 1)
    return kernel(components.find_root(point) for point in range(pi.k))


def meet(pi, sigma):
    _check_same_size(pi, sigma)
    return kernel(zip(pi.rgs, sigma.rgs))


def is_leq(pi, sigma):
    """True iff every block of pi lies inside a block of sigma."""
    _check_same_size(pi, sigma)
    image = {}
    for a, b in zip(pi.rgs, sigma.rgs):
        if image.setdefault(a, b) != b:
            return False
    return True


def is_noncrossing(pi):
    rgs = pi.rgs
    first = {}
    last = {}
    for position, label in enumerate(rgs):
        if label in last:
            previous = last[label]
            for between in range(previous + 1, position):
                other = rgs[between]
                if other != label and first[other] < previous:
                    return False
        else:
            first[label] = position
        last[label] = position
    return True


def restrict(pi, subset):
    """
    Partition of {1,...,|subset|} induced on ``subset``, relabelled in order.
    """
    points = sorted(set(int(point) for point in subset))
    if points and (points[0] < 1 or points[-1] > pi.k):
        raise SizeMismatch(f"subset {points} is not inside 1..{pi.k}")
    return kernel(pi.rgs[point - 1] for point in points)


def interval_blocks(pi):
    """Blocks of pi made of consecutive points."""
    return [block for block in pi.blocks if block[-1] - block[0] + 1 == len(block)]


def require_noncrossing(pi):
    if not is_noncrossing(pi):
        raise CrossingPartition(f"{pi} is crossing")


def _generate(k, family):
    """
    Restricted-growth strings of the family in lexicographic order.

    Crossings and oversized blocks are pruned while the string grows; even
    block sizes and exact pairings are only decidable at the end.
    """
    noncrossing = family is not PartitionFamily.ALL
    max_block = 2 if family in (PartitionFamily.NC2, PartitionFamily.NCB) else k
    labels = []
    first = []
    last = []
    sizes = []

    def crosses(label, position):
        previous = last[label]
        for between in range(previous + 1, position):
            other = labels[between]
            if other != label and first[other] < previous:
                return True
        return False

    def grow(position):
        if position == k:
            if family is PartitionFamily.NC2 and any(size != 2 for size in sizes):
                return
            if family is PartitionFamily.NCH and any(size % 2 for size in sizes):
                return
            yield tuple(labels)
            return
        for label in range(len(sizes) + 1):
            if label < len(sizes):
                if sizes[label] >= max_block:
                    continue
                if noncrossing and crosses(label, position):
                    continue
                saved = last[label]
                labels.append(label)
                sizes[label] += 1
                last[label] = position
                yield from grow(position + 1)
                labels.pop()
                sizes[label] -= 1
                last[label] = saved
            else:
                labels.append(label)
                first.append(position)
                last.append(position)
                sizes.append(1)
                yield from grow(position + 1)
                labels.pop()
                first.pop()
                last.pop()
                sizes.pop()

    return grow(0)


@lru_cache(maxsize=None)
def _enumerate_cached(family, k):
    if family is PartitionFamily.NC2 and k % 2:
        return ()
    partitions = tuple(SetPartition(rgs) for rgs in _generate(k, family))
    logger.debug(f"Enumerated {len(partitions)} partitions of {k} points in {family.name}")
    return partitions


def enumerate_partitions(family, k):
    """
    Every member of ``family`` on {1,...,k}, lexicographic in the RGS.

    k=0 yields the single empty partition; NC2 on an odd ground set is empty.
    """
    if k < 0:
        raise MalformedInput("k must be non-negative")
    return list(_enumerate_cached(PartitionFamily(family), k))
