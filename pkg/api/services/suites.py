"""
Built-in verification suites.

Every suite expands its parameters into independent items, runs them
(through joblib when FREECALC_N_JOBS > 1) and collects one row per item in
submission order, so reports do not depend on the schedule.
"""
import itertools
import logging
import time
from collections import namedtuple
from fractions import Fraction

import numpy as np
from django.conf import settings
from joblib import Parallel, delayed

from . import families
from .codec import format_rational
from .errors import MalformedInput, UnknownSuite
from .infdiv import verify_divisibility_equivalence
from .invariance import (
    entry_cumulant,
    extrapolate_limit,
    hplus_coefficients,
    hplus_invariance_of_rcyclic,
    invariance_check,
    is_projection_fixed,
    kernel_moments,
    limit_cumulant_estimate,
    moment_array,
    oplus_coefficients,
    reconstruct_from_coefficients,
    representative,
    tvector,
)
from .linalg import identity, rank
from .matrix_models import (
    cumulant_factor_identity,
    cyclic_cumulant_identity,
    cyclic_letters,
    freeness_from_mnb_over_b,
    freeness_from_mnb_over_d,
    is_rcyclic,
    is_uniformly_rcyclic,
)
from .mobius import mobius
from .nc_transforms import fatten, hat, inverse_fatten, kreweras, nch_decompose, shift_left, wreath
from .opval import BaseAlgebra
from .partitions import PartitionFamily, SetPartition, catalan, enumerate_partitions, is_leq, join
from .weingarten import QuantumGroup, asymptotic_table, category, gram, haar_integral, rate_check, weingarten

logger = logging.getLogger(__name__)

Suite = namedtuple('Suite', ['build', 'defaults', 'description'])


class SuiteReport:
    def __init__(self, suite, params, items, elapsed=0.0):
        self.suite = suite
        self.params = params
        self.items = items
        self.elapsed = elapsed

    @property
    def passed(self):
        return all(item['passed'] for item in self.items)

    def as_dict(self):
        return {
            'suite': self.suite,
            'params': self.params,
            'passed': self.passed,
            'items': self.items,
        }

    def __repr__(self):
        return f"SuiteReport({self.suite!r}, passed={self.passed}, items={len(self.items)})"


# fatfacts

def _fatten_bijection(k):
    members = enumerate_partitions(PartitionFamily.NC, k)
    pairings = enumerate_partitions(PartitionFamily.NC2, 2 * k)
    images = [fatten(pi) for pi in members]
    passed = set(images) == set(pairings) and len(images) == len(pairings) == catalan(k)
    passed = passed and all(inverse_fatten(image) == pi for image, pi in zip(images, members))
    return passed, f"|NC({k})| = {len(members)}, |NC2({2 * k})| = {len(pairings)}"


def _hat_identity(k):
    floor = hat(SetPartition.zero(k))
    members = enumerate_partitions(PartitionFamily.NC, k)
    failures = [pi for pi in members if hat(pi) != join(fatten(pi), floor)]
    return not failures, f"{len(failures)} failures over {len(members)} partitions"


def _kreweras_shift(k):
    members = enumerate_partitions(PartitionFamily.NC, k)
    failures = [
        pi for pi in members
        if fatten(kreweras(pi)) != shift_left(fatten(pi)) or pi.block_count + kreweras(pi).block_count != k + 1
    ]
    return not failures, f"{len(failures)} failures over {len(members)} partitions"


def _fattened_join(k):
    members = enumerate_partitions(PartitionFamily.NC, k)
    checked = 0
    for sigma, pi in itertools.product(members, repeat=2):
        if not is_leq(sigma, pi):
            continue
        checked += 1
        tau = join(fatten(sigma), fatten(pi))
        if not PartitionFamily.NCH.contains(tau) or kreweras(tau) != wreath(sigma, kreweras(pi)):
            return False, f"fails at sigma={sigma}, pi={pi}"
        if nch_decompose(tau) != (sigma, pi):
            return False, f"decomposition of {tau} is not ({sigma}, {pi})"
    even = enumerate_partitions(PartitionFamily.NCH, 2 * k)
    for tau in even:
        first, second = nch_decompose(tau)
        if not is_leq(first, second) or join(fatten(first), fatten(second)) != tau:
            return False, f"decomposition of {tau} does not rebuild it"
    return True, f"{checked} ordered pairs, {len(even)} partitions with even blocks"


def _fatfacts(k):
    items = []
    for size in range(1, k + 1):
        items.append((f"fattening is a bijection, k={size}", _fatten_bijection, (size,)))
        items.append((f"hat is the join with the fattened bottom, k={size}", _hat_identity, (size,)))
        items.append((f"Kreweras complement shifts the fattening, k={size}", _kreweras_shift, (size,)))
        if size <= 5:
            items.append((f"joins of fattenings have even blocks, k={size}", _fattened_join, (size,)))
    return items


# mobius

def _delta_relations(k):
    members = enumerate_partitions(PartitionFamily.NC, k)
    zeta = np.array([[int(is_leq(a, b)) for b in members] for a in members], dtype=object)
    mu = np.array([[mobius(a, b) for b in members] for a in members], dtype=object)
    unit = identity(len(members))
    passed = bool((mu.dot(zeta) == unit).all() and (zeta.dot(mu) == unit).all())
    return passed, f"{len(members)}x{len(members)} incidence matrices"


def _bottom_to_top(k):
    value = mobius(SetPartition.zero(k), SetPartition.one(k))
    expected = (-1) ** (k - 1) * catalan(k - 1)
    return value == expected, f"mu(0_{k}, 1_{k}) = {value}"


def _hat_invariance(k):
    members = enumerate_partitions(PartitionFamily.NC, k)
    failures = [
        (a, b) for a, b in itertools.product(members, repeat=2)
        if is_leq(a, b) and mobius(hat(a), hat(b)) != mobius(a, b)
    ]
    return not failures, f"{len(failures)} failures"


def _even_block_factorization(k):
    even = enumerate_partitions(PartitionFamily.NCH, 2 * k)
    parts = {tau: nch_decompose(tau) for tau in even}
    for lower, upper in itertools.product(even, repeat=2):
        (p1, p2), (s1, s2) = parts[lower], parts[upper]
        below = is_leq(lower, upper)
        if below != (is_leq(s1, p1) and is_leq(p2, s2)):
            return False, f"order criterion fails at {lower} <= {upper}"
        if below and mobius(lower, upper) != mobius(s1, p1) * mobius(p2, s2):
            return False, f"factorization fails at {lower} <= {upper}"
    return True, f"{len(even) ** 2} pairs"


def _mobius(k):
    items = []
    for size in range(1, k + 1):
        items.append((f"delta relations on NC({size})", _delta_relations, (size,)))
    for size in range(1, min(k + 2, 8) + 1):
        items.append((f"mu(0, 1) on NC({size})", _bottom_to_top, (size,)))
    for size in range(1, min(k, 5) + 1):
        items.append((f"hat preserves mu, k={size}", _hat_invariance, (size,)))
    for size in range(1, min(k, 4) + 1):
        items.append((f"even-block intervals factor, k={size}", _even_block_factorization, (size,)))
    return items


# weingarten-asymptotics

def _inverse_identity(group, k, n_list):
    for n in n_list:
        product = weingarten(group, k, n).entries.dot(gram(group, k, n).entries)
        if not (product == identity(len(category(group, k)))).all():
            return False, f"W G != I at n={n}"
    return True, f"|D({k})| = {len(category(group, k))}"


def _decay(group, k, n_list):
    table = asymptotic_table(group, k, n_list)
    slow = [(pi, sigma) for pi, sigma, errors in table if not rate_check(errors)]
    worst = max((abs(errors[max(n_list)]) for _, _, errors in table), default=Fraction(0))
    return not slow, f"{len(slow)} slow entries, largest error at n={max(n_list)}: {format_rational(worst)}"


def _row_sums(n):
    sums = [sum((haar_integral(QuantumGroup.SPLUS, n, (i,), (j,)) for j in range(1, n + 1)), Fraction(0))
            for i in range(1, n + 1)]
    return all(value == 1 for value in sums), f"n={n}"


def _orthogonality(n):
    for i, j in itertools.product((1, 2), repeat=2):
        total = sum((haar_integral(QuantumGroup.OPLUS, n, (i, j), (m, m)) for m in range(1, n + 1)), Fraction(0))
        if total != int(i == j):
            return False, f"sum over m of u_{i}m u_{j}m = {format_rational(total)} at n={n}"
    return True, f"n={n}"


INVERSE_DIMENSIONS = range(4, 10)
INVERSE_MAX_CATEGORY = 150


def _weingarten_asymptotics(k, n, K):
    """
    Decay checks for up to k points on the n list; W G = I for up to K points
    at every n in 4..9 and on the n list, while |D(k)| <= INVERSE_MAX_CATEGORY.
    """
    items = []
    inverse_n = sorted(set(INVERSE_DIMENSIONS) | set(n))
    for group in QuantumGroup:
        for size in range(1, max(k, K) + 1):
            members = len(category(group, size))
            if not members:
                continue
            if size <= K and members <= INVERSE_MAX_CATEGORY:
                items.append((f"{group} inverse, k={size}", _inverse_identity, (group, size, inverse_n)))
            if size <= k:
                items.append((f"{group} decay to Möbius, k={size}", _decay, (group, size, n)))
    for dimension in range(4, 8):
        items.append((f"S+ rows sum to 1, n={dimension}", _row_sums, (dimension,)))
        items.append((f"O+ orthogonality, n={dimension}", _orthogonality, (dimension,)))
    return items


# rcyclic-equivalence / uniform-equivalence

def _build(index, n, K):
    name, build, rcyclic, uniform = families.SUITE_FAMILIES[index]
    return build(n, K), rcyclic, uniform


def _unit_insertions(algebra, k):
    return [algebra.identity()] * k


def _rcyclic_item(index, n, K):
    family, expected, _ = _build(index, n, K)
    found = is_rcyclic(family)
    free = freeness_from_mnb_over_d(family)
    if found != expected or free != found:
        return False, f"R-cyclic {found} (expected {expected}), free over D {free}"
    if found:
        for k in range(1, family.K + 1):
            for rword in itertools.product(range(family.s), repeat=k):
                for iword in itertools.product(range(1, n + 1), repeat=k - 1):
                    left, right = cyclic_cumulant_identity(
                        family, rword, iword, _unit_insertions(family.algebra, k)
                    )
                    if not np.array_equal(left, right):
                        return False, f"cyclic cumulant identity fails on {rword}, {iword}"
    return True, f"R-cyclic {found}, free over D {free}"


def _uniform_item(index, n, K):
    family, _, expected = _build(index, n, K)
    found = is_uniformly_rcyclic(family)
    free = freeness_from_mnb_over_b(family)
    if found != expected or free != found:
        return False, f"uniformly R-cyclic {found} (expected {expected}), free over B {free}"
    if found:
        for k in range(1, family.K + 1):
            for rword in itertools.product(range(family.s), repeat=k):
                left, right = cumulant_factor_identity(family, rword, _unit_insertions(family.algebra, k))
                if BaseAlgebra.key(left) != BaseAlgebra.key(right):
                    return False, f"cumulant scaling fails on {rword}"
    return True, f"uniformly R-cyclic {found}, free over B {free}"


def _equivalence_items(n, K, check):
    return [
        (f"{name}, n={size}", check, (index, size, K))
        for size in n
        for index, (name, _, _, _) in enumerate(families.SUITE_FAMILIES)
    ]


def _rcyclic_equivalence(n, K):
    return _equivalence_items(n, K, _rcyclic_item)


def _uniform_equivalence(n, K):
    return _equivalence_items(n, K, _uniform_item)


# oplus-invariance

UNIFORM_BASES = [
    ('semicircular', lambda K: families.semicircular(1, K)),
    ('free Poisson', lambda K: families.free_poisson(1, K)),
    ('semicircular pair', lambda K: families.semicircular_pair([[1, Fraction(1, 2)], [Fraction(1, 2), 2]], K)),
]


def _oplus_item(index, n, k):
    base = UNIFORM_BASES[index][1](max(k, 2))
    moments = kernel_moments(base, k).at(n)
    certificate = invariance_check(moments, QuantumGroup.OPLUS, n_jobs=1)
    if not certificate.consistent:
        return False, f"inconsistent at {certificate.witness()}"
    expected = oplus_coefficients(base, k)
    for system in certificate.systems:
        target = expected[system.word]
        if any(value != target.get(pi, 0) for pi, value in system.coefficients.items()):
            return False, f"coefficients of word {system.word} differ from the cyclic cumulants"
    if not is_projection_fixed(moments, QuantumGroup.OPLUS, (0,) * min(k, 2)):
        return False, "Weingarten projection moves the moments"
    return True, f"{len(certificate.systems)} systems consistent"


def _oplus_invariance(n, k):
    return [
        (f"{name}, n={size}", _oplus_item, (index, size, k))
        for size in n
        for index, (name, _) in enumerate(UNIFORM_BASES)
    ]


# hplus-invariance

# (name, build(n, K), expected invariance, word length of the span test on a
# non-invariant family or None)
HPLUS_FAMILIES = [
    ('uniform semicircular', lambda n, K: families.uniform_semicircular(n, 1, K), True, None),
    ('exchangeable R-cyclic', families.exchangeable_rcyclic, True, None),
    ('diagonal i.i.d.', families.diagonal_iid, True, None),
    ('zero', families.zero_family, True, None),
    ('index-dependent R-cyclic', families.index_dependent_rcyclic, False, 2),
    ('crossing R-cyclic', lambda n, K: families.crossing_rcyclic(n, max(K, 4)), False, None),
    ('symmetric semicircular', families.symmetric_semicircular, False, 2),
]


def _hplus_rejection(family, k):
    moments = moment_array(family, k)
    certificate = invariance_check(moments, QuantumGroup.HPLUS, n_jobs=1)
    if certificate.consistent:
        return False, "H+ span test accepts a family with a non-invariant determining series"
    return True, f"not invariant, witness {certificate.witness()}"


def _hplus_item(index, n, k):
    name, build, expected, span_length = HPLUS_FAMILIES[index]
    family = build(n, max(k, 2))
    found = hplus_invariance_of_rcyclic(family)
    if found != expected:
        return False, f"determining series invariance {found}, expected {expected}"
    if not found:
        if span_length is None:
            return True, "not invariant, as expected"
        return _hplus_rejection(family, span_length)
    moments = moment_array(family, k, compressed=True)
    certificate = invariance_check(moments, QuantumGroup.HPLUS, n_jobs=1)
    if not certificate.consistent:
        return False, f"H+ span test inconsistent at {certificate.witness()}"
    table = hplus_coefficients(family, k)
    for system in certificate.systems:
        function, _ = moments.kernel_function(system.word)
        for rho, value in function.items():
            if reconstruct_from_coefficients(table[system.word], representative(rho)) != value:
                return False, f"even-block coefficients miss the moment of {system.word} at {rho}"
    return True, f"{len(certificate.systems)} systems consistent"


def _hplus_invariance(n, k):
    return [
        (f"{name}, n={size}", _hplus_item, (index, size, k))
        for size in n
        for index, (name, _, _, _) in enumerate(HPLUS_FAMILIES)
    ]


# splus-counterexample

CROSSING = SetPartition.parse('{{1,3},{2,4}}')


def _span_obstruction(n):
    family = families.symmetric_semicircular(n, 2)
    moments = moment_array(family, 2, compressed=True)
    certificate = invariance_check(moments, QuantumGroup.SPLUS, n_jobs=1)
    by_length = {system.k: system for system in certificate.systems}
    if by_length[1].coefficients is None or by_length[2].coefficients is not None:
        return False, "expected a consistent first and an inconsistent second moment"
    return True, f"witness {by_length[2].witness}"


def _moment_decomposition(n):
    family = families.symmetric_semicircular(n, 2)
    expanded = moment_array(family, 2)
    vector = np.array(
        [expanded.value((0, 0), indices) for indices in itertools.product(range(1, n + 1), repeat=4)],
        dtype=object,
    )
    combination = (
        tvector(CROSSING, n) + tvector(SetPartition.parse('{{1,4},{2,3}}'), n) - tvector(SetPartition.one(4), n)
    )
    return bool((vector == combination).all()), f"dimension {len(vector)}"


def _crossing_rank(n):
    vectors = [tvector(pi, n) for pi in enumerate_partitions(PartitionFamily.NC, 4)]
    base = rank(np.array(vectors, dtype=object).T)
    extended = rank(np.array(vectors + [tvector(CROSSING, n)], dtype=object).T)
    return base == len(vectors) and extended == base + 1, f"rank {base} -> {extended} in dimension {n ** 4}"


def _splus_counterexample(n):
    items = []
    for size in n:
        items.append((f"S+ span test fails on the symmetric semicircular, n={size}", _span_obstruction, (size,)))
        items.append((f"second moments are T_cross + T_nest - T_one, n={size}", _moment_decomposition, (size,)))
        items.append((f"crossing vector lies outside the noncrossing span, n={size}", _crossing_rank, (size,)))
    return items


# limit-convergence

def _index_pattern(k, cyclic):
    if cyclic:
        return tuple(index for letter in cyclic_letters(tuple(range(1, k + 1))) for index in letter)
    return (1, 2) * k


LIMIT_BASES = [
    ('semicircular', lambda K: families.semicircular(1, K), lambda n, K: families.uniform_semicircular(n, 1, K)),
    ('free Poisson', lambda K: families.free_poisson(1, K), families.uniform_free_poisson),
]


def _limit_item(index, k, tau, cyclic, n_list):
    _, base_for, model_for = LIMIT_BASES[index]
    K = max(k, 2)
    moments = kernel_moments(base_for(K), k)
    word = (0,) * k
    j = _index_pattern(k, cyclic)
    exact = entry_cumulant(model_for(max(j), K), word, tau, j)
    fit = extrapolate_limit(
        lambda n: limit_cumulant_estimate(moments, word, tau, j, QuantumGroup.OPLUS, [n])[n], 2 * k
    )
    values = limit_cumulant_estimate(moments, word, tau, j, QuantumGroup.OPLUS, n_list)
    errors = {n: abs(value - exact) for n, value in values.items()}
    passed = fit.verified and fit.limit == exact and all(error <= fit.bound / n for n, error in errors.items())
    detail = ', '.join(f"n={n}: {format_rational(error)}" for n, error in sorted(errors.items()))
    return passed, f"limit {format_rational(fit.limit)}, C={format_rational(fit.bound)}; errors {detail}"


def _limit_convergence(n, k):
    if min(n) < 4:
        raise MalformedInput("limit convergence needs n >= 4")
    return [
        (f"{name}, tau={tau}, {'cyclic' if cyclic else 'non-cyclic'} indices", _limit_item, (index, size, tau, cyclic, n))
        for index, (name, _, _) in enumerate(LIMIT_BASES)
        for size in range(1, k + 1)
        for tau in enumerate_partitions(PartitionFamily.NC, size)
        for cyclic in (True, False)
    ]


# divisibility

DIVISIBLE_BASES = [
    ('semicircular', lambda K: families.semicircular(1, K)),
    ('free Poisson', lambda K: families.free_poisson(1, K)),
    ('zero', lambda K: families.zero_distribution(1, 1, K)),
]


def _divisibility_item(index, n, K):
    report = verify_divisibility_equivalence(DIVISIBLE_BASES[index][1](max(K, 2)), n)
    failed = ', '.join(f"{row['identity']} k={row['k']}" for row in report.failures())
    return report.passed, failed or f"{len(report.rows)} identities hold"


def _divisibility(n, K):
    return [
        (f"{name}, n={size}", _divisibility_item, (index, size, K))
        for size in n
        for index, (name, _) in enumerate(DIVISIBLE_BASES)
    ]


SUITES = {
    'fatfacts': Suite(_fatfacts, {'k': 6}, 'fattening, hat and Kreweras identities'),
    'mobius': Suite(_mobius, {'k': 6}, 'Möbius function of NC(k)'),
    'weingarten-asymptotics': Suite(
        _weingarten_asymptotics, {'k': 6, 'n': [4, 8, 16], 'K': 8}, 'exact inverses and 1/n decay to Möbius'
    ),
    'rcyclic-equivalence': Suite(_rcyclic_equivalence, {'n': [2, 3], 'K': 4}, 'R-cyclicity vs freeness over D'),
    'uniform-equivalence': Suite(
        _uniform_equivalence, {'n': [2, 3], 'K': 4}, 'uniform R-cyclicity vs freeness over B'
    ),
    'oplus-invariance': Suite(_oplus_invariance, {'n': [4, 5], 'k': 3}, 'uniform models are O+-invariant'),
    'hplus-invariance': Suite(_hplus_invariance, {'n': [4], 'k': 3}, 'determining series and H+-invariance'),
    'splus-counterexample': Suite(_splus_counterexample, {'n': [4]}, 'symmetric semicircular is not S+-invariant'),
    'limit-convergence': Suite(
        _limit_convergence, {'n': [4, 8, 16, 32], 'k': 3}, 'finite-n cumulant formula converges like 1/n'
    ),
    'divisibility': Suite(_divisibility, {'n': [2, 3, 4], 'K': 4}, 'free divisibility identities'),
}


def get_suite(suite_id):
    try:
        return SUITES[suite_id]
    except KeyError:
        raise UnknownSuite(suite_id)


def resolve_params(suite_id, params=None):
    """Suite defaults overridden by the given params; unknown keys are rejected."""
    suite = get_suite(suite_id)
    resolved = dict(suite.defaults)
    for key, value in (params or {}).items():
        if value is None:
            continue
        if key not in suite.defaults:
            raise MalformedInput(f"suite {suite_id} takes no parameter {key!r}")
        if isinstance(suite.defaults[key], list):
            value = sorted({int(item) for item in (value if isinstance(value, (list, tuple)) else [value])})
            if not value:
                raise MalformedInput(f"{key} needs at least one value")
        else:
            value = int(value)
        if (value if isinstance(value, int) else min(value)) < 1:
            raise MalformedInput(f"{key} must be positive")
        resolved[key] = value
    return resolved


def _run_item(name, check, args):
    try:
        passed, detail = check(*args)
    except Exception as e:
        logger.error(f"Suite item {name!r} raised: {str(e)}", exc_info=True)
        return {'name': name, 'passed': False, 'detail': f"error: {str(e)}"}
    return {'name': name, 'passed': bool(passed), 'detail': detail}


def run_suite(suite_id, params=None, n_jobs=None):
    suite = get_suite(suite_id)
    resolved = resolve_params(suite_id, params)
    tasks = suite.build(**resolved)
    n_jobs = n_jobs if n_jobs is not None else getattr(settings, 'FREECALC_N_JOBS', 1)
    logger.info(f"Running suite {suite_id} with {len(tasks)} items on {n_jobs} workers")
    started = time.monotonic()
    items = Parallel(n_jobs=n_jobs)(delayed(_run_item)(name, check, args) for name, check, args in tasks)
    report = SuiteReport(suite_id, resolved, list(items), time.monotonic() - started)
    if report.passed:
        logger.info(f"Suite {suite_id} passed in {report.elapsed:.1f}s")
    else:
        logger.warning(f"Suite {suite_id} failed: {[item['name'] for item in items if not item['passed']]}")
    return report
