"""
Families of n×n matrices over a B-valued probability space, described by
the joint cumulants of their entries.

Entry x^{(r)}_{ij} of X_r is generator ``(r*n + i-1)*n + j-1`` of the entry
distribution (i, j 1-based, r 0-based). Elements of M_n(B) are nd×nd
numpy object arrays; block (i, j) is the B-coefficient of V_ij.
"""
import itertools
import logging
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import MalformedInput, SizeMismatch, TruncationExceeded
from .mobius import mobius
from .opval import (
    BaseAlgebra,
    DistributionSpec,
    MomentSpec,
    cumulants_from_moments,
    is_zero,
    moments_from_cumulants,
    nested_eval,
)
from .partitions import PartitionFamily, SetPartition, enumerate_partitions

logger = logging.getLogger(__name__)

MNB = 'MnB'
OVER_D = 'D'
OVER_B = 'B'
TARGETS = (MNB, OVER_D, OVER_B)


def matrix_zero(n, d):
    return np.full((n * d, n * d), Fraction(0), dtype=object)


def matrix_identity(n, d):
    return embed(BaseAlgebra(d).identity(), n)


def embed(b, n):
    """b ⊗ 1, the copy of B on the diagonal of M_n(B)."""
    d = b.shape[0]
    matrix = matrix_zero(n, d)
    for i in range(n):
        matrix[i * d:(i + 1) * d, i * d:(i + 1) * d] = b
    return matrix


def unit_block(n, i, j, b):
    """b ⊗ V_ij."""
    d = b.shape[0]
    matrix = matrix_zero(n, d)
    matrix[(i - 1) * d:i * d, (j - 1) * d:j * d] = b
    return matrix


def block(matrix, i, j, d):
    return matrix[(i - 1) * d:i * d, (j - 1) * d:j * d]


def diagonal_matrix(blocks):
    n = len(blocks)
    d = blocks[0].shape[0]
    matrix = matrix_zero(n, d)
    for i, b in enumerate(blocks, start=1):
        matrix[(i - 1) * d:i * d, (i - 1) * d:i * d] = b
    return matrix


def project(matrix, target, n, d):
    """
    E_D or E_B of a constant element of M_n(B); E_B returns an element of B.
    """
    if target == MNB:
        return matrix
    if target == OVER_D:
        return diagonal_matrix([block(matrix, i, i, d).copy() for i in range(1, n + 1)])
    if target == OVER_B:
        total = np.full((d, d), Fraction(0), dtype=object)
        for i in range(1, n + 1):
            total = total + block(matrix, i, i, d)
        return total / n
    raise MalformedInput(f"unknown conditional expectation {target!r}")


class MatrixFamilySpec:
    """
    X_1, ..., X_s in M_n(A) through the cumulants of their entries.

    ``entries`` maps (generator word, interior basis word) to B values, with
    generators numbered by ``generator(i, j, r)``. ``involution`` acts on
    the family index r and is lifted to (i, j, r) -> (j, i, involution[r]).
    """

    def __init__(self, n, s, algebra, K, entries=None, involution=None):
        self.n = int(n)
        self.s = int(s)
        if self.n < 1 or self.s < 1:
            raise MalformedInput("n and s must be positive")
        self.involution = tuple(range(self.s)) if involution is None else tuple(involution)
        lifted = [0] * (self.n * self.n * self.s)
        for r in range(self.s):
            for i in range(1, self.n + 1):
                for j in range(1, self.n + 1):
                    lifted[self.generator(i, j, r)] = self.generator(j, i, self.involution[r])
        self.distribution = DistributionSpec(algebra, self.n * self.n * self.s, K, entries, lifted)

    @classmethod
    def from_distribution(cls, n, s, distribution, involution=None):
        if distribution.s != n * n * s:
            raise SizeMismatch(f"entry distribution has {distribution.s} generators, expected {n * n * s}")
        entries = {(w, m): v for w, m, v in distribution.entries()}
        return cls(n, s, distribution.algebra, distribution.K, entries, involution)

    @property
    def algebra(self):
        return self.distribution.algebra

    @property
    def d(self):
        return self.distribution.algebra.d

    @property
    def K(self):
        return self.distribution.K

    def generator(self, i, j, r):
        return (r * self.n + (i - 1)) * self.n + (j - 1)

    def entry(self, g):
        """(i, j, r) of generator g."""
        rest, j = divmod(g, self.n)
        r, i = divmod(rest, self.n)
        return i + 1, j + 1, r

    @cached_property
    def moments(self):
        return moments_from_cumulants(self.distribution)

    def entries(self):
        return self.distribution.entries()

    def cumulant(self, letters, insertions):
        """kappa_E of entries given as (i, j, r) triples."""
        return self.distribution.evaluate([self.generator(*letter) for letter in letters], insertions)

    def __repr__(self):
        return f"MatrixFamilySpec(n={self.n}, s={self.s}, d={self.d}, K={self.K})"


class DeterminingSeries:
    """
    Cyclic cumulants theta(r-word, i-word, interior) =
    kappa[x^{(r_1)}_{i_k i_1} E_{m_1}, x^{(r_2)}_{i_1 i_2} E_{m_2}, ..., x^{(r_k)}_{i_{k-1} i_k}].
    """

    def __init__(self, algebra, n, s, K, values=None):
        self.algebra = algebra
        self.n = n
        self.s = s
        self.K = K
        self._values = {}
        for (rword, iword, interior), value in (values or {}).items():
            if not is_zero(value):
                self._values[(tuple(rword), tuple(iword), tuple(interior))] = value

    @classmethod
    def from_function(cls, algebra, n, s, K, function):
        values = {}
        for k in range(1, K + 1):
            for rword in itertools.product(range(s), repeat=k):
                for iword in itertools.product(range(1, n + 1), repeat=k):
                    for interior in itertools.product(range(algebra.dimension), repeat=k - 1):
                        value = function(rword, iword, interior)
                        if value is not None:
                            values[(rword, iword, interior)] = np.array(value, dtype=object)
        return cls(algebra, n, s, K, values)

    def value(self, rword, iword, interior):
        stored = self._values.get((tuple(rword), tuple(iword), tuple(interior)))
        return self.algebra.zero() if stored is None else stored

    def items(self):
        return sorted(self._values.items(), key=lambda item: (len(item[0][0]), item[0]))

    def support(self):
        """(r-word, interior) pairs with some nonzero value."""
        return sorted({(rword, interior) for rword, _, interior in self._values}, key=lambda key: (len(key[0]), key))


def cyclic_letters(iword):
    """Entry positions (i_{l-1}, i_l) with i_0 = i_k."""
    return [(iword[l - 1], iword[l]) for l in range(len(iword))]


def build_rcyclic(series, involution=None):
    """Entry cumulants equal to the series on cyclic patterns, zero elsewhere."""
    n = series.n
    family = MatrixFamilySpec(n, series.s, series.algebra, series.K, involution=involution)
    entries = {}
    for (rword, iword, interior), value in series.items():
        word = tuple(
            family.generator(i, j, r) for (i, j), r in zip(cyclic_letters(iword), rword)
        )
        entries[(word, interior)] = value
    return MatrixFamilySpec(n, series.s, series.algebra, series.K, entries, involution)


def build_uniform_rcyclic(base, n):
    """
    kappa[x^{(r_1)}_{i_k i_1} b_1, ..., x^{(r_k)}_{i_{k-1} i_k} b_k] equals the base
    cumulant for every index word; every non-cyclic pattern vanishes.
    """
    values = {}
    for word, interior, value in base.entries():
        for iword in itertools.product(range(1, n + 1), repeat=len(word)):
            values[(word, iword, interior)] = value
    series = DeterminingSeries(base.algebra, n, base.s, base.K, values)
    return build_rcyclic(series, base.involution)


def _pattern(family, word):
    return [family.entry(g) for g in word]


def _is_cyclic(pattern):
    k = len(pattern)
    return all(pattern[l][1] == pattern[(l + 1) % k][0] for l in range(k))


def is_rcyclic(family):
    for word, interior, _ in family.entries():
        if not _is_cyclic(_pattern(family, word)):
            logger.debug(f"Non-cyclic cumulant on {_pattern(family, word)} with interior {interior}")
            return False
    return True


def determining_series(family):
    values = {}
    for word, interior, value in family.entries():
        pattern = _pattern(family, word)
        if _is_cyclic(pattern):
            rword = tuple(r for _, _, r in pattern)
            iword = tuple(j for _, j, _ in pattern)
            values[(rword, iword, interior)] = value
    return DeterminingSeries(family.algebra, family.n, family.s, family.K, values)


def is_uniformly_rcyclic(family):
    """
    R-cyclic, and every cyclic cumulant equals the one at index word (1, ..., 1).
    """
    if not is_rcyclic(family):
        return False
    grouped = {}
    for (rword, iword, interior), value in determining_series(family).items():
        grouped.setdefault((rword, interior), {})[iword] = BaseAlgebra.key(value)
    for (rword, interior), values in grouped.items():
        reference = values.get((1,) * len(rword))
        if reference is None or len(values) != family.n ** len(rword):
            return False
        if any(value != reference for value in values.values()):
            return False
    return True


class MatrixWord:
    """
    C_0 X_{r_1} C_1 X_{r_2} ... X_{r_k} C_k with C_l in M_n(B).

    Stored as ``lead`` (C_0) and ``letters``, pairs (r_l, C_l).
    """

    def __init__(self, lead, letters=()):
        self.lead = lead
        self.letters = tuple(letters)

    @classmethod
    def parse(cls, items, n, d):
        """
        Build from an alternating sequence of family indices and constant
        matrices; adjacent constants multiply, missing ones are the identity.
        """
        identity = matrix_identity(n, d)
        lead = identity
        letters = []
        for item in items:
            if isinstance(item, (int, np.integer)):
                letters.append([int(item), identity])
            elif letters:
                letters[-1][1] = letters[-1][1] @ item
            else:
                lead = lead @ item
        return cls(lead, [tuple(letter) for letter in letters])

    def __len__(self):
        return len(self.letters)

    def __matmul__(self, other):
        if not self.letters:
            return MatrixWord(self.lead @ other.lead, other.letters)
        head = self.letters[:-1]
        r, coefficient = self.letters[-1]
        return MatrixWord(self.lead, head + ((r, coefficient @ other.lead),) + other.letters)

    def scaled(self, factor):
        return MatrixWord(self.lead * Fraction(factor), self.letters)


def _nonzero_blocks(matrix, n, d):
    rows = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            b = block(matrix, i, j, d)
            if not is_zero(b):
                rows.setdefault(i, []).append((j, b))
    return rows


def _word_expectation(family, word):
    """E_{M_n(B)} of a single word, by summing entry moments over index paths."""
    n, d = family.n, family.d
    k = len(word.letters)
    if k == 0:
        return word.lead
    if k > family.K:
        raise TruncationExceeded(k, family.K)
    moments = family.moments
    coefficient_rows = [_nonzero_blocks(coefficient, n, d) for _, coefficient in word.letters]
    result = matrix_zero(n, d)

    def walk(position, start, row, generators, insertions):
        r = word.letters[position][0]
        for j, targets in coefficient_rows[position].items():
            g = family.generator(row, j, r)
            for column, b in targets:
                if position == k - 1:
                    value = moments.evaluate(generators + (g,), insertions + [b])
                    if not is_zero(value):
                        result[(start - 1) * d:start * d, (column - 1) * d:column * d] += value
                else:
                    walk(position + 1, start, column, generators + (g,), insertions + [b])

    for start in range(1, n + 1):
        walk(0, start, start, (), [])
    return word.lead @ result


def _terms(word_or_polynomial):
    if isinstance(word_or_polynomial, MatrixWord):
        return [word_or_polynomial]
    return list(word_or_polynomial)


def expectation(family, target, word):
    """
    E_{M_n(B)}, E_D or E_B of a MatrixWord or of a list of them (their sum).
    """
    if target not in TARGETS:
        raise MalformedInput(f"unknown conditional expectation {target!r}")
    total = matrix_zero(family.n, family.d)
    for term in _terms(word):
        total = total + _word_expectation(family, term)
    return project(total, target, family.n, family.d)


def _as_matrix(value, target, n):
    return embed(value, n) if target == OVER_B else value


def matrix_cumulants(family, target, letters):
    """
    kappa_{E_D} or kappa_{E_B} of X_{r_1} C_1, ..., X_{r_k} C_k by Möbius
    inversion of the corresponding moments. ``letters`` are (r, C) pairs.
    """
    if target not in (OVER_D, OVER_B):
        raise MalformedInput(f"cumulants are taken over D or B, not {target!r}")
    k = len(letters)
    if k > family.K:
        raise TruncationExceeded(k, family.K)
    identity = matrix_identity(family.n, family.d)

    def functional(args):
        return _as_matrix(expectation(family, target, MatrixWord(identity, args)), target, family.n)

    top = SetPartition.one(k)
    total = matrix_zero(family.n, family.d)
    for sigma in enumerate_partitions(PartitionFamily.NC, k):
        weight = mobius(sigma, top)
        if weight:
            total = total + nested_eval(functional, sigma, list(letters)) * weight
    if target == OVER_B:
        return block(total, 1, 1, family.d).copy()
    return total


def cyclic_cumulant_identity(family, rword, iword, insertions):
    """
    Both sides of kappa_{E_D}[X b_1 V_{i_1 i_1}, ..., X b_k] =
    sum over i_k of kappa_E[x_{i_k i_1} b_1, ..., x_{i_{k-1} i_k} b_k] V_{i_k i_k}.

    ``iword`` holds i_1..i_{k-1}; ``insertions`` holds b_1..b_k.
    """
    n = family.n
    k = len(rword)
    letters = [
        (r, unit_block(n, i, i, b)) for r, i, b in zip(rword[:-1], iword, insertions[:-1])
    ] + [(rword[-1], embed(insertions[-1], n))]
    left = matrix_cumulants(family, OVER_D, letters)
    blocks = []
    for last in range(1, n + 1):
        full = tuple(iword) + (last,)
        word = [family.generator(i, j, r) for (i, j), r in zip(cyclic_letters(full), rword)]
        blocks.append(family.distribution.evaluate(word, list(insertions)))
    return left, diagonal_matrix(blocks)


def cumulant_factor_identity(family, rword, insertions):
    """
    Both sides of kappa_E[x_11 b_1, ..., x_11 b_k] = n^{1-k} kappa_{E_B}[X b_1, ..., X b_k].
    """
    n = family.n
    k = len(rword)
    word = [family.generator(1, 1, r) for r in rword]
    left = family.distribution.evaluate(word, list(insertions))
    letters = [(r, embed(b, n)) for r, b in zip(rword, insertions)]
    right = matrix_cumulants(family, OVER_B, letters) * Fraction(n) ** (1 - k)
    return left, right


def _family_letters(family, target):
    """Spanning words X_{r_1} C_1 ... X_{r_m} with C_l basis insertions of D or B."""
    n, d = family.n, family.d
    identity = matrix_identity(n, d)
    if target == OVER_D:
        insertions = [
            unit_block(n, i, i, family.algebra.basis(m)) for i in range(1, n + 1) for m in range(d * d)
        ]
    else:
        insertions = [embed(family.algebra.basis(m), n) for m in range(d * d)]
    letters = {}
    for m in range(1, family.K + 1):
        letters[m] = [
            MatrixWord(identity, list(zip(rword[:-1], interior)) + [(rword[-1], identity)])
            for rword in itertools.product(range(family.s), repeat=m)
            for interior in itertools.product(insertions, repeat=m - 1)
        ]
    return letters


def _constant_letters(family, target):
    """Spanning set of the centered constants of M_n(B)."""
    n, d = family.n, family.d
    units = [family.algebra.basis(m) for m in range(d * d)]
    letters = [unit_block(n, i, j, b) for i in range(1, n + 1) for j in range(1, n + 1) if i != j for b in units]
    if target == OVER_B:
        for i in range(2, n + 1):
            for b in units:
                letters.append(unit_block(n, i, i, b) - unit_block(n, 1, 1, b))
    return letters


def _centered(family, target, word):
    mean = _as_matrix(expectation(family, target, word), target, family.n)
    return [word, MatrixWord(-mean)]


def _compositions(total, parts):
    if parts == 1:
        for first in range(1, total + 1):
            yield (first,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _core_lengths(K):
    seen = set()
    for total in range(1, K + 1):
        for parts in range(1, total + 1):
            for lengths in _compositions(total, parts):
                if lengths not in seen:
                    seen.add(lengths)
                    yield lengths


def find_freeness_violation(family, target):
    """
    First alternating centered word whose expectation does not vanish, or None.

    Alternating products of centered letters vanish under E_D (or E_B) iff
    every product F_1 M_1 F_2 ... M_{p-1} F_p of centered family letters F
    and centered constants M has E_{M_n(B)} equal to 0; the outer constant
    letters read off the single entries.
    """
    if target not in (OVER_D, OVER_B):
        raise MalformedInput(f"freeness is tested over D or B, not {target!r}")
    families = _family_letters(family, target)
    centered = {m: [_centered(family, target, word) for word in words] for m, words in families.items()}
    constants = [MatrixWord(matrix) for matrix in _constant_letters(family, target)]
    zero = matrix_zero(family.n, family.d)
    for lengths in _core_lengths(family.K):
        pools = [centered[m] for m in lengths]
        for chosen in itertools.product(*pools):
            for separators in itertools.product(constants, repeat=len(lengths) - 1):
                terms = chosen[0]
                for separator, letter in zip(separators, chosen[1:]):
                    terms = [term @ separator @ other for term in terms for other in letter]
                value = expectation(family, MNB, terms)
                if not np.array_equal(value, zero):
                    logger.debug(f"Alternating word with family lengths {lengths} has nonzero expectation")
                    return {'lengths': lengths, 'value': value}
    return None


def freeness_from_mnb_over_d(family):
    """Freeness of the family and D from M_n(B) with amalgamation over D, up to order K."""
    return find_freeness_violation(family, OVER_D) is None


def freeness_from_mnb_over_b(family):
    """Freeness of the family from M_n(B) with amalgamation over B, up to order K."""
    return find_freeness_violation(family, OVER_B) is None


def product_family(family, pairs):
    """
    Entries of X_a X_b for each pair (a, b), by expanding entry moments and
    inverting back to cumulants. Usable order halves to K // 2.
    """
    n, d = family.n, family.d
    K = family.K // 2
    if K < 1:
        raise TruncationExceeded(2, family.K)
    pairs = [tuple(pair) for pair in pairs]
    algebra = family.algebra
    identity = algebra.identity()
    moments = family.moments
    size = len(pairs)

    def source(word, interior):
        total = algebra.zero()
        insertions = [algebra.basis(m) for m in interior] + [identity]
        products = []
        for g in word:
            rest, j = divmod(g, n)
            t, i = divmod(rest, n)
            products.append((t, i + 1, j + 1))
        for middles in itertools.product(range(1, n + 1), repeat=len(word)):
            generators = []
            expanded = []
            for (t, i, j), l, insertion in zip(products, middles, insertions):
                a, b = pairs[t]
                generators += [family.generator(i, l, a), family.generator(l, j, b)]
                expanded += [identity, insertion]
            total = total + moments.evaluate(generators, expanded)
        return total

    lifted = MomentSpec(algebra, n * n * size, K, source=source)
    distribution = cumulants_from_moments(lifted)
    involution = list(range(size))
    for t, (a, b) in enumerate(pairs):
        partner = (family.involution[b], family.involution[a])
        if partner in pairs:
            involution[t] = list(pairs).index(partner)
    if any(involution[involution[t]] != t for t in range(size)):
        involution = None
    return MatrixFamilySpec.from_distribution(n, size, distribution, involution)


def adjoin_diagonal(family, diagonal):
    """
    Append the constant diagonal matrix with blocks ``diagonal`` as X_s.
    """
    if len(diagonal) != family.n:
        raise SizeMismatch(f"{family.n} diagonal blocks expected, got {len(diagonal)}")
    s = family.s + 1
    extended = MatrixFamilySpec(family.n, s, family.algebra, family.K, involution=family.involution + (family.s,))
    entries = {(w, m): v for w, m, v in family.entries()}
    for i, b in enumerate(diagonal, start=1):
        if not is_zero(b):
            entries[((extended.generator(i, i, family.s),), ())] = b
    return MatrixFamilySpec(family.n, s, family.algebra, family.K, entries, extended.involution)


def bimodule_transform(family, left, right, shift=None):
    """
    Y_r = L X_r R + S for diagonal L, R, S given by their n blocks.

    Entry y_ij = l_i x_ij r_j + [i = j] s_i, so for k >= 2
    kappa[y b_1, ..., y b_k] = l_{i_1} kappa[x (r_{j_1} b_1 l_{i_2}), ..., x r_{j_k} b_k].
    """
    n = family.n
    algebra = family.algebra
    if len(left) != n or len(right) != n or (shift is not None and len(shift) != n):
        raise SizeMismatch(f"diagonal data must have {n} blocks")
    entries = {}
    for word in sorted(family.distribution.support(), key=lambda w: (len(w), w)):
        pattern = _pattern(family, word)
        k = len(word)
        for interior in itertools.product(range(algebra.dimension), repeat=k - 1):
            insertions = []
            for position, (i, j, _) in enumerate(pattern):
                if position < k - 1:
                    following = pattern[position + 1][0]
                    insertions.append(right[j - 1] @ algebra.basis(interior[position]) @ left[following - 1])
                else:
                    insertions.append(right[j - 1])
            value = left[pattern[0][0] - 1] @ family.distribution.evaluate(word, insertions)
            if not is_zero(value):
                entries[(word, interior)] = value
    if shift is not None:
        for r in range(family.s):
            for i in range(1, n + 1):
                key = ((family.generator(i, i, r),), ())
                value = entries.get(key, algebra.zero()) + shift[i - 1]
                if is_zero(value):
                    entries.pop(key, None)
                else:
                    entries[key] = value
    return MatrixFamilySpec(n, family.s, algebra, family.K, entries, family.involution)
