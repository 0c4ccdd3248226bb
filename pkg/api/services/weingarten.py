"""
Gram and Weingarten matrices of the free easy quantum groups, and the
Haar-state integrals they compute.
"""
import enum
import logging
from fractions import Fraction
from functools import lru_cache

import numpy as np
from django.core.cache import caches
from django.core.cache.backends.base import InvalidCacheBackendError

from .errors import MalformedInput, SingularGram, SizeMismatch
from .linalg import SingularMatrix, inverse
from .mobius import mobius
from .partitions import PartitionFamily, enumerate_partitions, is_leq, join, kernel

logger = logging.getLogger(__name__)

CACHE_ALIAS = 'weingarten'


class QuantumGroup(enum.Enum):
    OPLUS = ('o+', PartitionFamily.NC2)
    SPLUS = ('s+', PartitionFamily.NC)
    HPLUS = ('h+', PartitionFamily.NCH)
    BPLUS = ('b+', PartitionFamily.NCB)

    def __init__(self, label, family):
        self.label = label
        self.family = family

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        cleaned = str(text).strip().lower()
        for group in cls:
            if cleaned in (group.label, group.name.lower()):
                return group
        raise MalformedInput(f"unknown quantum group {text!r}")

    def __str__(self):
        return self.name


class PartitionMatrix:
    """
    Square table indexed by the category D(k) in canonical order.
    """

    def __init__(self, group, k, n, order, entries):
        self.group = group
        self.k = k
        self.n = n
        self.order = tuple(order)
        self.entries = entries
        self.entries.setflags(write=False)
        self._index = {pi: position for position, pi in enumerate(self.order)}

    def __getitem__(self, key):
        pi, sigma = key
        return self.entries[self._index[pi], self._index[sigma]]

    def __len__(self):
        return len(self.order)

    def index(self, pi):
        return self._index[pi]

    def as_dict(self):
        return {
            str(pi): {str(sigma): self.entries[i, j] for j, sigma in enumerate(self.order)}
            for i, pi in enumerate(self.order)
        }


def category(group, k):
    return enumerate_partitions(QuantumGroup.parse(group).family, k)


def _check_dimensions(k, n):
    if k < 0:
        raise MalformedInput("k must be non-negative")
    if n < 1:
        raise MalformedInput("n must be positive")


def _gram_entries(order, n):
    size = len(order)
    entries = np.empty((size, size), dtype=object)
    for i, pi in enumerate(order):
        for j in range(i, size):
            value = n ** join(pi, order[j]).block_count
            entries[i, j] = entries[j, i] = value
    return entries


def gram(group, k, n):
    """G(pi, sigma) = n^{|pi v sigma|} over D(k)."""
    group = QuantumGroup.parse(group)
    _check_dimensions(k, n)
    order = category(group, k)
    return PartitionMatrix(group, k, n, order, _gram_entries(order, n))


def _shared_cache():
    try:
        return caches[CACHE_ALIAS]
    except InvalidCacheBackendError:
        return None


@lru_cache(maxsize=128)
def _weingarten_entries(group, k, n):
    cache = _shared_cache()
    key = f"wg:{group.label}:{k}:{n}"
    if cache is not None:
        try:
            stored = cache.get(key)
        except Exception as e:
            logger.warning(f"Weingarten cache read failed for {key}: {str(e)}")
            stored = None
        if stored is not None:
            logger.debug(f"Weingarten matrix {key} loaded from cache")
            return stored
    order = category(group, k)
    logger.info(f"Inverting the Gram matrix of {group} on {k} points at n={n} ({len(order)} partitions)")
    try:
        entries = inverse(_gram_entries(order, n))
    except SingularMatrix:
        raise SingularGram(group, k, n)
    if cache is not None:
        try:
            cache.set(key, entries, timeout=None)
        except Exception as e:
            logger.warning(f"Weingarten cache write failed for {key}: {str(e)}")
    return entries


def weingarten(group, k, n):
    """
    Exact inverse of the Gram matrix; SingularGram when it has none.

    Results are memoized in-process and in the ``weingarten`` cache alias.
    """
    group = QuantumGroup.parse(group)
    _check_dimensions(k, n)
    entries = np.array(_weingarten_entries(group, k, n), dtype=object)
    return PartitionMatrix(group, k, n, category(group, k), entries)


def haar_integral(group, n, i, j):
    """
    Integral of u_{i_1 j_1} ... u_{i_k j_k} against the Haar state.
    """
    group = QuantumGroup.parse(group)
    i = tuple(int(index) for index in i)
    j = tuple(int(index) for index in j)
    if len(i) != len(j):
        raise SizeMismatch(f"index tuples of lengths {len(i)} and {len(j)}")
    if any(index < 1 or index > n for index in i + j):
        raise MalformedInput(f"indices must lie in 1..{n}")
    k = len(i)
    if k == 0:
        return Fraction(1)
    order = category(group, k)
    if not order:
        return Fraction(0)
    matrix = weingarten(group, k, n)
    kernel_i = kernel(i)
    kernel_j = kernel(j)
    rows = [position for position, pi in enumerate(order) if is_leq(pi, kernel_i)]
    columns = [position for position, sigma in enumerate(order) if is_leq(sigma, kernel_j)]
    if not rows or not columns:
        return Fraction(0)
    return Fraction(sum(matrix.entries[np.ix_(rows, columns)].flat, Fraction(0)))


def asymptotic_table(group, k, n_list):
    """
    Rows (pi, sigma, {n: n^{|pi|} W(pi, sigma) - mu(pi, sigma)}).
    """
    group = QuantumGroup.parse(group)
    order = category(group, k)
    matrices = {n: weingarten(group, k, n) for n in n_list}
    table = []
    for a, pi in enumerate(order):
        for b, sigma in enumerate(order):
            limit = mobius(pi, sigma)
            errors = {
                n: Fraction(n) ** pi.block_count * matrices[n].entries[a, b] - limit
                for n in n_list
            }
            table.append((pi, sigma, errors))
    return table


def rate_check(errors):
    """
    True iff the errors decay like 1/n: |error| non-increasing in n, strictly
    while nonzero, and n·|error| at most doubling between sample points.
    """
    points = sorted(errors)
    for smaller, larger in zip(points, points[1:]):
        before, after = abs(errors[smaller]), abs(errors[larger])
        if after > before or (before != 0 and after == before):
            return False
        if larger * after > 2 * smaller * before:
            return False
    return True
