"""
Operator-valued free probability over B = M_d(Q).

Elements of B are d×d numpy object arrays of Fractions and multiply with
``@``. A truncated distribution stores, for each generator word
r_1...r_k (k <= K) and each interior basis word m_1...m_{k-1}, the value
kappa[x_{r_1} E_{m_1}, ..., x_{r_{k-1}} E_{m_{k-1}}, x_{r_k}]. Arbitrary
insertions are handled by multilinearity and the last insertion b_k is
applied on the right, as for the outer b_0 on the left.
"""
import itertools
import logging
from fractions import Fraction
from functools import reduce

import numpy as np

from .errors import MalformedInput, SizeMismatch, TruncationExceeded
from .mobius import mobius
from .partitions import (
    PartitionFamily,
    SetPartition,
    enumerate_partitions,
    join,
    kernel,
    require_noncrossing,
)

logger = logging.getLogger(__name__)


def is_zero(value):
    return not any(value.flat)


class BaseAlgebra:
    """
    M_d over the rationals with the row-major basis of matrix units.
    """

    def __init__(self, d):
        if int(d) < 1:
            raise MalformedInput("d must be positive")
        self.d = int(d)

    def __eq__(self, other):
        return isinstance(other, BaseAlgebra) and other.d == self.d

    def __hash__(self):
        return hash(('BaseAlgebra', self.d))

    def __repr__(self):
        return f"BaseAlgebra(d={self.d})"

    @property
    def dimension(self):
        return self.d * self.d

    def zero(self):
        return np.full((self.d, self.d), Fraction(0), dtype=object)

    def identity(self):
        element = self.zero()
        for p in range(self.d):
            element[p, p] = Fraction(1)
        return element

    def scalar(self, value):
        return self.identity() * Fraction(value)

    def unit(self, p, q):
        element = self.zero()
        element[p, q] = Fraction(1)
        return element

    def basis(self, m):
        if not 0 <= m < self.dimension:
            raise MalformedInput(f"basis index {m} outside 0..{self.dimension - 1}")
        return self.unit(*divmod(m, self.d))

    def element(self, rows):
        element = np.array([[Fraction(value) for value in row] for row in rows], dtype=object)
        if element.shape != (self.d, self.d):
            raise MalformedInput(f"expected a {self.d}x{self.d} matrix, got shape {element.shape}")
        return element

    def coordinates(self, element):
        """Nonzero (basis index, coefficient) pairs of ``element``."""
        return [(m, value) for m, value in enumerate(element.flat) if value != 0]

    def adjoint_index(self, m):
        p, q = divmod(m, self.d)
        return q * self.d + p

    @staticmethod
    def key(element):
        return tuple(element.flat)


class MultilinearFamily:
    """
    Shared storage and multilinear evaluation for truncated B-valued
    families of functionals on s generators.
    """

    def __init__(self, algebra, s, K, involution=None):
        self.algebra = algebra
        self.s = int(s)
        self.K = int(K)
        if self.s < 1 or self.K < 1:
            raise MalformedInput("s and K must be positive")
        self.involution = tuple(range(self.s)) if involution is None else tuple(int(r) for r in involution)
        if sorted(self.involution) != list(range(self.s)) or any(
            self.involution[self.involution[r]] != r for r in range(self.s)
        ):
            raise MalformedInput(f"{self.involution} is not an involution of 0..{self.s - 1}")

    def basis_value(self, word, interior):
        raise NotImplementedError

    def _check_word(self, word):
        if len(word) > self.K:
            raise TruncationExceeded(len(word), self.K)
        if any(not 0 <= r < self.s for r in word):
            raise MalformedInput(f"generator outside 0..{self.s - 1} in {word}")

    def evaluate(self, word, insertions):
        """
        Value on x_{r_1} b_1, ..., x_{r_k} b_k for arbitrary insertions b_l.
        """
        word = tuple(word)
        if len(insertions) != len(word):
            raise SizeMismatch(f"{len(word)} generators but {len(insertions)} insertions")
        self._check_word(word)
        k = len(word)
        if k == 0:
            return self.empty_value()
        last = insertions[-1]
        if self.algebra.d == 1:
            coefficient = reduce(lambda a, b: a * b[0, 0], insertions[:-1], Fraction(1))
            if coefficient == 0:
                return self.algebra.zero()
            return (self.basis_value(word, (0,) * (k - 1)) * coefficient) @ last
        slots = [self.algebra.coordinates(insertion) for insertion in insertions[:-1]]
        total = self.algebra.zero()
        for combination in itertools.product(*slots):
            value = self.basis_value(word, tuple(m for m, _ in combination))
            if is_zero(value):
                continue
            coefficient = reduce(lambda a, b: a * b[1], combination, Fraction(1))
            total = total + value * coefficient
        return total @ last

    def empty_value(self):
        raise MalformedInput("the empty word has no value here")

    def functional(self, args):
        """Block evaluation for ``nested_eval``: args are (generator, insertion) pairs."""
        return self.evaluate([label for label, _ in args], [coefficient for _, coefficient in args])

    def words(self, k):
        return itertools.product(range(self.s), repeat=k)

    def interiors(self, k):
        return itertools.product(range(self.algebra.dimension), repeat=max(k - 1, 0))

    def table(self):
        """Every (word, interior, value) with a nonzero value, k = 1..K."""
        rows = []
        for k in range(1, self.K + 1):
            for word in self.words(k):
                for interior in self.interiors(k):
                    value = self.basis_value(word, interior)
                    if not is_zero(value):
                        rows.append((word, interior, value))
        return rows


class DistributionSpec(MultilinearFamily):
    """
    Truncated cumulant data kappa^{(k)}, k <= K. Absent entries are zero.
    """

    def __init__(self, algebra, s, K, entries=None, involution=None):
        super().__init__(algebra, s, K, involution)
        self._by_word = {}
        for (word, interior), value in (entries or {}).items():
            word = tuple(int(r) for r in word)
            interior = tuple(int(m) for m in interior)
            if not word:
                raise MalformedInput("cumulant words must be nonempty")
            self._check_word(word)
            if len(interior) != len(word) - 1:
                raise SizeMismatch(f"word {word} needs {len(word) - 1} interior insertions, got {len(interior)}")
            if any(not 0 <= m < algebra.dimension for m in interior):
                raise MalformedInput(f"basis index outside 0..{algebra.dimension - 1} in {interior}")
            value = np.array(value, dtype=object)
            if value.shape != (algebra.d, algebra.d):
                raise MalformedInput(f"value for {word} is not {algebra.d}x{algebra.d}")
            if not is_zero(value):
                value = np.vectorize(Fraction, otypes=[object])(value)
                value.setflags(write=False)
                self._by_word.setdefault(word, {})[interior] = value

    def basis_value(self, word, interior):
        stored = self._by_word.get(tuple(word))
        if stored is None:
            return self.algebra.zero()
        value = stored.get(tuple(interior))
        return self.algebra.zero() if value is None else value

    def entries(self):
        """Stored nonzero entries in canonical order."""
        for word in sorted(self._by_word, key=lambda w: (len(w), w)):
            for interior in sorted(self._by_word[word]):
                yield word, interior, self._by_word[word][interior]

    def support(self):
        return set(self._by_word)

    def with_order(self, K):
        return DistributionSpec(
            self.algebra,
            self.s,
            K,
            {(w, m): v for w, m, v in self.entries() if len(w) <= K},
            self.involution,
        )

    def __eq__(self, other):
        if not isinstance(other, DistributionSpec):
            return NotImplemented
        if (self.algebra, self.s, self.K) != (other.algebra, other.s, other.K):
            return False
        mine = {(w, m): BaseAlgebra.key(v) for w, m, v in self.entries()}
        theirs = {(w, m): BaseAlgebra.key(v) for w, m, v in other.entries()}
        return mine == theirs

    __hash__ = None

    def __repr__(self):
        return f"DistributionSpec(d={self.algebra.d}, s={self.s}, K={self.K}, entries={sum(1 for _ in self.entries())})"


class MomentSpec(MultilinearFamily):
    """
    Truncated moments E[x_{r_1} b_1 ... x_{r_k} b_k]. Either a stored table
    or a ``source(word, interior)`` evaluated lazily and memoized.
    """

    def __init__(self, algebra, s, K, entries=None, involution=None, source=None):
        super().__init__(algebra, s, K, involution)
        self._source = source
        self._memo = {}
        for (word, interior), value in (entries or {}).items():
            word = tuple(int(r) for r in word)
            self._check_word(word)
            if len(interior) != max(len(word) - 1, 0):
                raise SizeMismatch(f"word {word} needs {len(word) - 1} interior insertions")
            value = np.vectorize(Fraction, otypes=[object])(np.array(value, dtype=object))
            self._memo[(word, tuple(int(m) for m in interior))] = value

    def empty_value(self):
        return self.algebra.identity()

    def evaluate(self, word, insertions):
        if not word:
            # E[b] = b
            return self.algebra.identity() if not insertions else insertions[-1]
        return super().evaluate(word, insertions)

    def basis_value(self, word, interior):
        key = (tuple(word), tuple(interior))
        value = self._memo.get(key)
        if value is None:
            value = self._source(*key) if self._source is not None else self.algebra.zero()
            value.setflags(write=False)
            self._memo[key] = value
        return value

    def entries(self):
        for word, interior, value in self.table():
            yield word, interior, value

    def __repr__(self):
        return f"MomentSpec(d={self.algebra.d}, s={self.s}, K={self.K})"


def _interval_block(labels, pick_last):
    positions = {}
    for position, label in enumerate(labels):
        positions.setdefault(label, []).append(position)
    blocks = sorted(positions.values())
    candidates = [block for block in blocks if block[-1] - block[0] + 1 == len(block)]
    return candidates[-1] if pick_last else candidates[0]


def _nested(rho, labels, args, positions, pick_last):
    if len(set(labels)) <= 1:
        return rho(args, positions)
    block = _interval_block(labels, pick_last)
    start, stop = block[0], block[-1] + 1
    value = rho(args[start:stop], positions[start:stop])
    if is_zero(value):
        return value
    rest_labels = labels[:start] + labels[stop:]
    if start == 0:
        rest = _nested(rho, rest_labels, args[stop:], positions[stop:], pick_last)
        return value @ rest
    label, coefficient = args[start - 1]
    rest_args = args[:start - 1] + [(label, coefficient @ value)] + args[stop:]
    rest_positions = positions[:start] + positions[stop:]
    return _nested(rho, rest_labels, rest_args, rest_positions, pick_last)


def nested_block_eval(rho, pi, args, pick_last=False):
    """
    Like ``nested_eval`` with ``rho(args, positions)`` also told the original
    1-based positions of the block it evaluates.
    """
    require_noncrossing(pi)
    if len(args) != pi.k:
        raise SizeMismatch(f"{pi.k} points but {len(args)} arguments")
    if pi.k == 0:
        raise SizeMismatch("nothing to evaluate on zero points")
    return _nested(rho, list(pi.rgs), list(args), list(range(1, pi.k + 1)), pick_last)


def nested_eval(rho, pi, args, pick_last=False):
    """
    rho^{(pi)}[a_1, ..., a_n] by repeatedly removing an interval block.

    ``args`` are (label, coefficient) pairs standing for a_l = x_label·coefficient,
    ``rho(args)`` evaluates a single block. Values multiply coefficients on
    the right, or the remaining evaluation on the left when the interval
    starts at position 1.
    """
    return nested_block_eval(lambda block, _: rho(block), pi, args, pick_last)


def _unit_args(algebra, word, interior):
    coefficients = [algebra.basis(m) for m in interior] + [algebra.identity()]
    return list(zip(word, coefficients))


def _moment_from_cumulants(spec, word, interior):
    args = _unit_args(spec.algebra, word, interior)
    total = spec.algebra.zero()
    for pi in enumerate_partitions(PartitionFamily.NC, len(word)):
        total = total + _nested(
            lambda block, _: spec.functional(block), list(pi.rgs), args, list(range(1, len(word) + 1)), False
        )
    return total


def moments_from_cumulants(spec):
    """
    Moments E[x_{r_1} b_1 ... x_{r_k} b_k] = sum over NC(k) of kappa^{(pi)},
    computed on demand.
    """
    return MomentSpec(
        spec.algebra,
        spec.s,
        spec.K,
        involution=spec.involution,
        source=lambda word, interior: _moment_from_cumulants(spec, word, interior),
    )


def cumulant_value(moments, word, interior):
    """kappa[...] = sum over sigma in NC(k) of mu(sigma, 1_k) E^{(sigma)}[...]."""
    k = len(word)
    args = _unit_args(moments.algebra, word, interior)
    top = SetPartition.one(k)
    total = moments.algebra.zero()
    for sigma in enumerate_partitions(PartitionFamily.NC, k):
        weight = mobius(sigma, top)
        if weight == 0:
            continue
        value = _nested(
            lambda block, _: moments.functional(block), list(sigma.rgs), args, list(range(1, k + 1)), False
        )
        total = total + value * weight
    return total


def cumulants_from_moments(moments):
    """Möbius inversion of a MomentSpec, materialized up to its order."""
    entries = {}
    for k in range(1, moments.K + 1):
        for word in moments.words(k):
            for interior in moments.interiors(k):
                value = cumulant_value(moments, word, interior)
                if not is_zero(value):
                    entries[(word, interior)] = value
    logger.debug(f"Inverted moments into {len(entries)} cumulant entries")
    return DistributionSpec(moments.algebra, moments.s, moments.K, entries, moments.involution)


def _grouping_labels(grouping, s):
    if isinstance(grouping, SetPartition):
        if grouping.k != s:
            raise SizeMismatch(f"grouping covers {grouping.k} generators, spec has {s}")
        return grouping.rgs
    labels = [None] * s
    for index, group in enumerate(grouping):
        for r in group:
            labels[r] = index
    if any(label is None for label in labels):
        raise MalformedInput("grouping must cover every generator")
    return labels


def freeness_check(spec, grouping):
    """
    True iff no stored cumulant mixes generators of two classes.

    ``grouping`` is a SetPartition of the s generators (generator r is point
    r+1) or a list of generator groups.
    """
    labels = _grouping_labels(grouping, spec.s)
    for word, interior, _ in spec.entries():
        if len({labels[r] for r in word}) > 1:
            logger.debug(f"Mixed cumulant on word {word} with interior {interior}")
            return False
    return True


def is_selfadjoint(spec):
    """
    kappa(w; m)^* == kappa(w reversed under the involution; m reversed and adjoint).
    """
    algebra = spec.algebra
    for word, interior, value in spec.entries():
        partner_word = tuple(spec.involution[r] for r in reversed(word))
        partner_interior = tuple(algebra.adjoint_index(m) for m in reversed(interior))
        partner = spec.basis_value(partner_word, partner_interior)
        if BaseAlgebra.key(partner) != BaseAlgebra.key(value.T):
            return False
    return True


def product_cumulant(spec, groups, insertions):
    """
    kappa[(x...x) b_1, ..., (x...x) b_k] for products of generators, by the
    formula over sigma in NC(m) with sigma v rho = 1_m, rho the groups.
    """
    if len(groups) != len(insertions):
        raise SizeMismatch(f"{len(groups)} products but {len(insertions)} insertions")
    identity = spec.algebra.identity()
    args = []
    labels = []
    for index, (group, insertion) in enumerate(zip(groups, insertions)):
        if not group:
            raise MalformedInput("products must be nonempty")
        for position, r in enumerate(group):
            args.append((r, insertion if position == len(group) - 1 else identity))
            labels.append(index)
    m = len(args)
    rho = kernel(labels)
    top = SetPartition.one(m)
    total = spec.algebra.zero()
    for sigma in enumerate_partitions(PartitionFamily.NC, m):
        if join(sigma, rho) == top:
            total = total + nested_eval(spec.functional, sigma, args)
    return total


def free_product(specs):
    """
    Generators of each spec in turn; no cumulant mixes two factors.
    """
    if not specs:
        raise MalformedInput("free product of nothing")
    algebra = specs[0].algebra
    if any(spec.algebra != algebra for spec in specs):
        raise SizeMismatch("free product needs a common base algebra")
    K = min(spec.K for spec in specs)
    entries = {}
    involution = []
    offset = 0
    for spec in specs:
        for word, interior, value in spec.entries():
            if len(word) <= K:
                entries[(tuple(r + offset for r in word), interior)] = value
        involution.extend(r + offset for r in spec.involution)
        offset += spec.s
    return DistributionSpec(algebra, offset, K, entries, involution)


def sum_moments(moments, groups):
    """
    Moments of y_c = sum of x_g over g in groups[c], by expanding every word.
    """
    for group in groups:
        if not group or any(not 0 <= g < moments.s for g in group):
            raise MalformedInput(f"invalid generator group {group}")

    def source(word, interior):
        total = moments.algebra.zero()
        for expanded in itertools.product(*(groups[c] for c in word)):
            total = total + moments.basis_value(expanded, interior)
        return total

    return MomentSpec(moments.algebra, len(groups), moments.K, source=source)
