"""
Quantum invariance of matrix families under conjugation.

The scalar state is the normalized trace on B. A family is G-invariant iff
for every word r_1..r_k the moment function
    i -> phi(x^{(r_1)}_{i_11 i_12} ... x^{(r_k)}_{i_k1 i_k2})
lies in the span of the indicator vectors T_pi, pi in D(2k). Moments that
depend on the indices only through ker i are compressed to one value per
kernel, so every span test becomes a system with one row per partition
rho of 2k points (|rho| <= n) and one column per pi in D(2k),
with entry [pi <= rho].
"""
import itertools
import logging
import math
from collections import namedtuple
from fractions import Fraction

import numpy as np
from django.conf import settings
from joblib import Parallel, delayed

from .errors import IncompleteMoments, MalformedInput, NotRCyclic, SizeMismatch
from .linalg import solve
from .matrix_models import build_uniform_rcyclic, determining_series, is_rcyclic
from .mobius import mobius
from .nc_transforms import fatten, hat, kreweras, nch_decompose
from .opval import DistributionSpec, is_zero, nested_block_eval, nested_eval
from .partitions import (
    PartitionFamily,
    SetPartition,
    enumerate_partitions,
    is_leq,
    join,
    kernel,
    meet,
    restrict,
)
from .weingarten import QuantumGroup, category, weingarten

logger = logging.getLogger(__name__)


def phi(value):
    """Normalized trace on M_d."""
    d = value.shape[0]
    return sum((value[p, p] for p in range(d)), Fraction(0)) / d


def representative(rho):
    """The index tuple (1-based) whose kernel is rho."""
    return tuple(label + 1 for label in rho.rgs)


class MomentArray:
    """
    Scalar moments phi(x^{(r_1)}_{i_11 i_12} ... x^{(r_k)}_{i_k1 i_k2}), k <= k_max.

    Either expanded, keyed by (word, index tuple of length 2k), or
    compressed, keyed by (word, SetPartition of 2k points). A compressed
    array with ``n=None`` is valid at every n.
    """

    def __init__(self, s, k_max, n=None, values=None, kernel_values=None):
        if (values is None) == (kernel_values is None):
            raise MalformedInput("give either expanded or compressed moments")
        if values is not None and n is None:
            raise MalformedInput("expanded moments need the index range n")
        self.s = int(s)
        self.k_max = int(k_max)
        self.n = None if n is None else int(n)
        self.compressed = kernel_values is not None
        if self.compressed:
            self._values = {(tuple(w), rho): Fraction(v) for (w, rho), v in kernel_values.items()}
        else:
            self._values = {(tuple(w), tuple(i)): Fraction(v) for (w, i), v in values.items()}
        for word, key in self._values:
            size = key.k if self.compressed else len(key)
            if not word or len(word) > self.k_max or size != 2 * len(word):
                raise SizeMismatch(f"word {word} does not match a pattern of {size} indices")

    def words(self, k):
        return itertools.product(range(self.s), repeat=k)

    def systems(self):
        return [(k, word) for k in range(1, self.k_max + 1) for word in self.words(k)]

    def items(self):
        return sorted(self._values.items(), key=lambda item: (len(item[0][0]), item[0][0], _sort_key(item[0][1])))

    def value(self, word, indices):
        word, indices = tuple(word), tuple(indices)
        if self.compressed:
            key = (word, kernel(indices))
        else:
            key = (word, indices)
        if key not in self._values:
            raise IncompleteMoments(f"no moment for word {word} at indices {indices}")
        return self._values[key]

    def kernel_rows(self, k, n=None):
        """Partitions of 2k points realizable by indices in 1..n."""
        n = self.n if n is None else n
        rows = enumerate_partitions(PartitionFamily.ALL, 2 * k)
        return rows if n is None else [rho for rho in rows if rho.block_count <= n]

    def kernel_function(self, word, n=None):
        """
        (map rho -> value over realizable kernels, witness or None). The
        witness is an index tuple whose value differs from another tuple of
        the same kernel.
        """
        word = tuple(word)
        k = len(word)
        n = self.n if n is None else n
        if self.compressed:
            function = {}
            for rho in self.kernel_rows(k, n):
                if (word, rho) not in self._values:
                    raise IncompleteMoments(f"no moment for word {word} at kernel {rho}")
                function[rho] = self._values[(word, rho)]
            return function, None
        function = {}
        for indices in itertools.product(range(1, self.n + 1), repeat=2 * k):
            if (word, indices) not in self._values:
                raise IncompleteMoments(f"no moment for word {word} at indices {indices}")
            value = self._values[(word, indices)]
            rho = kernel(indices)
            if function.setdefault(rho, value) != value:
                return None, indices
        return function, None

    def compress(self):
        if self.compressed:
            return self
        kernel_values = {}
        for k in range(1, self.k_max + 1):
            for word in self.words(k):
                function, witness = self.kernel_function(word)
                if witness is not None:
                    raise MalformedInput(
                        f"moments of word {word} depend on more than the index kernel at {witness}"
                    )
                kernel_values.update({(word, rho): value for rho, value in function.items()})
        return MomentArray(self.s, self.k_max, self.n, kernel_values=kernel_values)

    def expand(self, n=None):
        n = self.n if n is None else n
        if n is None:
            raise MalformedInput("expanding needs the index range n")
        if not self.compressed:
            return self
        values = {}
        for k in range(1, self.k_max + 1):
            for word in self.words(k):
                function, _ = self.kernel_function(word, n)
                for indices in itertools.product(range(1, n + 1), repeat=2 * k):
                    values[(word, indices)] = function[kernel(indices)]
        return MomentArray(self.s, self.k_max, n, values=values)

    def at(self, n):
        """This compressed array read at a concrete n."""
        if not self.compressed:
            raise MalformedInput("only compressed moments can be re-read at another n")
        kernel_values = {
            (word, rho): value for (word, rho), value in self._values.items() if rho.block_count <= n
        }
        return MomentArray(self.s, self.k_max, n, kernel_values=kernel_values)


def _sort_key(key):
    return key.rgs if isinstance(key, SetPartition) else key


def moment_array(family, k_max, compressed=False):
    """
    phi-moments of a matrix family. Compressed arrays evaluate one
    representative per kernel and are only valid for kernel-invariant families.
    """
    n = family.n
    identity = family.algebra.identity()
    moments = family.moments

    def evaluate(word, indices):
        generators = [
            family.generator(indices[2 * l], indices[2 * l + 1], r) for l, r in enumerate(word)
        ]
        return phi(moments.evaluate(generators, [identity] * len(word)))

    values = {}
    for k in range(1, k_max + 1):
        for word in itertools.product(range(family.s), repeat=k):
            if compressed:
                for rho in enumerate_partitions(PartitionFamily.ALL, 2 * k):
                    if rho.block_count <= n:
                        values[(word, rho)] = evaluate(word, representative(rho))
            else:
                for indices in itertools.product(range(1, n + 1), repeat=2 * k):
                    values[(word, indices)] = evaluate(word, indices)
    logger.debug(f"Computed {len(values)} moments of {family!r} up to length {k_max}")
    if compressed:
        return MomentArray(family.s, k_max, n, kernel_values=values)
    return MomentArray(family.s, k_max, n, values=values)


def tvector(pi, n):
    """T_pi over all index tuples in lexicographic order: 1 where pi <= ker i."""
    return np.array(
        [int(is_leq(pi, kernel(indices))) for indices in itertools.product(range(1, n + 1), repeat=pi.k)],
        dtype=np.int64,
    )


SystemResult = namedtuple('SystemResult', ['k', 'word', 'coefficients', 'witness', 'dependent'])


class InvarianceCertificate:
    """
    Outcome of the span test: per (k, word) either coefficients c_pi over
    D(2k) or a witness index tuple.
    """

    def __init__(self, group, n, systems):
        self.group = group
        self.n = n
        self.systems = list(systems)
        self._by_word = {system.word: system for system in self.systems}

    @property
    def consistent(self):
        return all(system.coefficients is not None for system in self.systems)

    @property
    def dependent(self):
        return any(system.dependent for system in self.systems)

    def witness(self):
        for system in self.systems:
            if system.witness is not None:
                return system.word, system.witness
        return None

    def coefficients(self, word):
        return self._by_word[tuple(word)].coefficients

    def reconstruct(self, word, indices):
        """sum of c_pi over pi <= ker i."""
        coefficients = self.coefficients(word)
        if coefficients is None:
            raise MalformedInput(f"word {tuple(word)} has no invariant expansion")
        pattern = kernel(indices)
        return sum((c for pi, c in coefficients.items() if is_leq(pi, pattern)), Fraction(0))


def _solve_system(moments, group, k, word):
    function, witness = moments.kernel_function(word)
    if witness is not None:
        return SystemResult(k, word, None, witness, False)
    columns = category(group, 2 * k)
    rows = moments.kernel_rows(k)
    matrix = np.array([[int(is_leq(pi, rho)) for pi in columns] for rho in rows], dtype=object)
    rhs = np.array([function[rho] for rho in rows], dtype=object)
    solution = solve(matrix.reshape(len(rows), len(columns)), rhs)
    if solution.values is None:
        return SystemResult(k, word, None, representative(rows[solution.inconsistent_row]), False)
    coefficients = {pi: solution.values[position, 0] for position, pi in enumerate(columns)}
    return SystemResult(k, word, coefficients, None, solution.rank < len(columns))


def _n_jobs(n_jobs):
    return n_jobs if n_jobs is not None else getattr(settings, 'FREECALC_N_JOBS', 1)


def invariance_check(moments, group, n_jobs=None):
    """
    Decide G-invariance by solving one exact span system per (k, word).
    """
    group = QuantumGroup.parse(group)
    if moments.n is None:
        raise MalformedInput("the span test needs moments at a concrete n")
    if moments.n < 4:
        logger.warning(f"Span test at n={moments.n} < 4: the T_pi may be linearly dependent")
    systems = moments.systems()
    logger.info(f"Solving {len(systems)} span systems for {group} at n={moments.n}")
    results = Parallel(n_jobs=_n_jobs(n_jobs))(
        delayed(_solve_system)(moments, group, k, word) for k, word in systems
    )
    return InvarianceCertificate(group, moments.n, results)


def falling_factorial(n, b):
    return math.perm(n, b)


def pattern_sum(f, pi, n):
    """
    Sum of f(ker i) over index tuples i in 1..n with pi <= ker i, i.e.
    sum over rho >= pi of n(n-1)...(n-|rho|+1) f(rho).
    """
    lookup = f.__getitem__ if isinstance(f, dict) else f
    total = Fraction(0)
    for coarse in enumerate_partitions(PartitionFamily.ALL, pi.block_count):
        if coarse.block_count > n:
            continue
        rho = kernel(coarse.rgs[label] for label in pi.rgs)
        total += falling_factorial(n, rho.block_count) * Fraction(lookup(rho))
    return total


def haar_projection(moments, group, word):
    """
    Weingarten projection of the moment function of ``word`` onto the span of
    the T_pi, as a map on realizable kernels.
    """
    group = QuantumGroup.parse(group)
    n = moments.n
    function, witness = moments.kernel_function(word)
    if witness is not None:
        raise MalformedInput(f"moments of word {tuple(word)} depend on more than the kernel at {witness}")
    k = len(word)
    columns = category(group, 2 * k)
    matrix = weingarten(group, 2 * k, n)
    pairings = [pattern_sum(function, sigma, n) for sigma in columns]
    weights = [
        sum((matrix.entries[a, b] * pairings[b] for b in range(len(columns))), Fraction(0))
        for a in range(len(columns))
    ]
    return {
        rho: sum((weights[a] for a, pi in enumerate(columns) if is_leq(pi, rho)), Fraction(0))
        for rho in moments.kernel_rows(k)
    }


def is_projection_fixed(moments, group, word):
    function, _ = moments.kernel_function(word)
    projected = haar_projection(moments, group, word)
    return all(projected[rho] == function[rho] for rho in projected)


def _blockwise_weingarten(group, tau_hat, pi, sigma, n):
    weight = Fraction(1)
    for block in tau_hat.blocks:
        local = weingarten(group, len(block), n)
        weight *= local[restrict(pi, block), restrict(sigma, block)]
        if weight == 0:
            break
    return weight


def moment_formula_rhs(moments, word, tau, j, group, n=None):
    """
    phi of the Weingarten expression for E^{(tau)}[x_{j_11 j_12} ..., x_{j_k1 j_k2}].
    """
    group = QuantumGroup.parse(group)
    n = moments.n if n is None else n
    k = tau.k
    if len(word) != k or len(j) != 2 * k:
        raise SizeMismatch(f"tau has {k} points, word {len(word)} letters, indices {len(j)}")
    function, witness = moments.kernel_function(word, n)
    if witness is not None:
        raise MalformedInput(f"moments of word {tuple(word)} depend on more than the kernel at {witness}")
    tau_hat = hat(tau)
    bound = meet(tau_hat, kernel(j))
    members = category(group, 2 * k)
    upper = [sigma for sigma in members if is_leq(sigma, bound)]
    total = Fraction(0)
    for pi in members:
        if not is_leq(pi, tau_hat):
            continue
        inner = pattern_sum(function, pi, n)
        if inner == 0:
            continue
        for sigma in upper:
            total += _blockwise_weingarten(group, tau_hat, pi, sigma, n) * inner
    return total


def limit_cumulant_estimate(moments, word, tau, j, group, n_list):
    """
    {n: sum over sigma <= ker j with sigma v hat(0_k) = hat(tau), pi <= sigma in
    D(2k) of mu(pi, sigma) n^{-|pi|} sum_{i: pi <= ker i} phi(x_i)}.
    """
    group = QuantumGroup.parse(group)
    k = tau.k
    if len(word) != k or len(j) != 2 * k:
        raise SizeMismatch(f"tau has {k} points, word {len(word)} letters, indices {len(j)}")
    members = category(group, 2 * k)
    target = hat(tau)
    floor = hat(SetPartition.zero(k))
    pattern = kernel(j)
    outer = [sigma for sigma in members if is_leq(sigma, pattern) and join(sigma, floor) == target]
    terms = [
        (pi, mobius(pi, sigma))
        for sigma in outer
        for pi in members
        if is_leq(pi, sigma)
    ]
    values = {}
    for n in n_list:
        if moments.n is not None and moments.n != n:
            raise MalformedInput(f"moments were computed at n={moments.n}, not {n}")
        function, _ = moments.kernel_function(word, n)
        total = Fraction(0)
        for pi, weight in terms:
            if weight:
                total += weight * Fraction(1, n ** pi.block_count) * pattern_sum(function, pi, n)
        values[n] = total
    return values


LimitFit = namedtuple('LimitFit', ['limit', 'coefficients', 'bound', 'verified'])


def extrapolate_limit(function, degree, start=4):
    """
    Fit value(n) = a_0 + a_1/n + ... + a_degree/n^degree exactly through
    n = start, ..., start + degree and report a_0 and C = sum |a_m| start^{1-m},
    so that |value(n) - a_0| <= C/n for n >= start. ``verified`` checks the
    fit at one further point.
    """
    points = [start + offset for offset in range(degree + 1)]
    matrix = np.array(
        [[Fraction(1, n ** power) for power in range(degree + 1)] for n in points], dtype=object
    )
    rhs = np.array([Fraction(function(n)) for n in points], dtype=object)
    solution = solve(matrix, rhs)
    coefficients = [solution.values[power, 0] for power in range(degree + 1)]
    bound = sum((abs(a) * Fraction(start) ** (1 - m) for m, a in enumerate(coefficients) if m >= 1), Fraction(0))
    check = start + degree + 1
    predicted = sum((a * Fraction(1, check ** m) for m, a in enumerate(coefficients)), Fraction(0))
    return LimitFit(coefficients[0], coefficients, bound, predicted == Fraction(function(check)))


def entry_cumulant(family, word, tau, j):
    """phi(kappa^{(tau)}[x^{(r_1)}_{j_11 j_12}, ..., x^{(r_k)}_{j_k1 j_k2}]) of the entries."""
    identity = family.algebra.identity()
    args = [
        (family.generator(j[2 * l], j[2 * l + 1], r), identity) for l, r in enumerate(word)
    ]
    return phi(nested_eval(family.distribution.functional, tau, args))


def _base_cumulant(base, word, pi):
    identity = base.algebra.identity()
    return phi(nested_eval(base.functional, pi, [(r, identity) for r in word]))


def oplus_coefficients(base, k_max):
    """
    {word: {fatten(pi): phi(kappa^{(pi)}[x_{r_1}, ..., x_{r_k}])}} for the uniformly
    R-cyclic model over ``base``.
    """
    table = {}
    for k in range(1, k_max + 1):
        for word in base.words(k):
            table[word] = {
                fatten(pi): _base_cumulant(base, word, pi)
                for pi in enumerate_partitions(PartitionFamily.NC, k)
            }
    return table


def kernel_moments(base, k_max):
    """
    Compressed phi-moments of the uniformly R-cyclic model over ``base``,
    valid at every n: f(rho) = sum of phi(kappa^{(pi)}) over pi in NC(k) with
    fatten(pi) <= rho.
    """
    coefficients = oplus_coefficients(base, k_max)
    values = {}
    for k in range(1, k_max + 1):
        rows = enumerate_partitions(PartitionFamily.ALL, 2 * k)
        for word in base.words(k):
            nonzero = [(pi, c) for pi, c in coefficients[word].items() if c != 0]
            for rho in rows:
                values[(word, rho)] = sum((c for pi, c in nonzero if is_leq(pi, rho)), Fraction(0))
    return MomentArray(base.s, k_max, None, kernel_values=values)


DetseriesResult = namedtuple('DetseriesResult', ['invariant', 'coefficients', 'witness'])
DetseriesResult.__doc__ = """
``coefficients`` maps sigma in NC(k) to a DistributionSpec-shaped table of
c_{sigma, r}; ``witness`` is (r-word, interior, index word) on failure.
"""


def _detseries_system(series, rword, interior, n):
    algebra = series.algebra
    k = len(rword)
    columns = enumerate_partitions(PartitionFamily.NC, k)
    complements = [kreweras(sigma) for sigma in columns]
    function = {}
    for iword in itertools.product(range(1, n + 1), repeat=k):
        value = series.value(rword, iword, interior)
        rho = kernel(iword)
        stored = function.setdefault(rho, value)
        if not np.array_equal(stored, value):
            return None, iword
    rows = [rho for rho in enumerate_partitions(PartitionFamily.ALL, k) if rho.block_count <= n]
    matrix = np.array(
        [[int(is_leq(complement, rho)) for complement in complements] for rho in rows], dtype=object
    ).reshape(len(rows), len(columns))
    rhs = np.array([list(function[rho].flat) for rho in rows], dtype=object).reshape(len(rows), algebra.d ** 2)
    solution = solve(matrix, rhs)
    if solution.values is None:
        return None, representative(rows[solution.inconsistent_row])
    return {
        sigma: solution.values[position, :].reshape(algebra.d, algebra.d)
        for position, sigma in enumerate(columns)
    }, None


def detseries_perm_invariance_check(family):
    """
    Decide whether the determining series is invariant under quantum
    permutations: every cyclic cumulant must be a sum of c_sigma over
    sigma in NC(k) with K(sigma) <= ker(i_1, ..., i_k).
    """
    if not is_rcyclic(family):
        raise NotRCyclic(f"{family!r} is not R-cyclic")
    series = determining_series(family)
    tables = {}
    for rword, interior in series.support():
        solved, witness = _detseries_system(series, rword, interior, family.n)
        if solved is None:
            return DetseriesResult(False, None, (rword, interior, witness))
        for sigma, value in solved.items():
            if not is_zero(value):
                tables.setdefault(sigma, {})[(rword, interior)] = value
    coefficients = {
        sigma: DistributionSpec(family.algebra, family.s, family.K, entries)
        for sigma, entries in tables.items()
    }
    return DetseriesResult(True, coefficients, None)


def hplus_invariance_of_rcyclic(family):
    return is_rcyclic(family) and detseries_perm_invariance_check(family).invariant


def hplus_coefficients(family, k_max):
    """
    {word: {tau: c_tau}} over tau in NC_h(2k): c_tau = phi(c_{sigma, pi}[1, ..., 1])
    for (sigma, pi) = nch_decompose(tau), where c_{sigma, pi} nests c_{sigma|V}
    along the blocks V of pi.
    """
    result = detseries_perm_invariance_check(family)
    if not result.invariant:
        raise NotRCyclic(f"determining series of {family!r} is not invariant")
    algebra = family.algebra
    identity = algebra.identity()
    zero = DistributionSpec(algebra, family.s, family.K)

    def c_sigma_pi(sigma, pi, word):
        def block_value(args, positions):
            local = restrict(sigma, positions)
            return result.coefficients.get(local, zero).functional(args)

        return nested_block_eval(block_value, pi, [(r, identity) for r in word])

    table = {}
    for k in range(1, k_max + 1):
        for word in itertools.product(range(family.s), repeat=k):
            table[word] = {}
            for tau in enumerate_partitions(PartitionFamily.NCH, 2 * k):
                sigma, pi = nch_decompose(tau)
                table[word][tau] = phi(c_sigma_pi(sigma, pi, word))
    return table


def reconstruct_from_coefficients(coefficients, indices):
    """sum of c_pi over pi <= ker i for a {pi: c_pi} table."""
    pattern = kernel(indices)
    return sum((c for pi, c in coefficients.items() if is_leq(pi, pattern)), Fraction(0))


def uniform_model_moments(base, n, k_max, compressed=True):
    """phi-moments of build_uniform_rcyclic(base, n)."""
    return moment_array(build_uniform_rcyclic(base, n), k_max, compressed)
