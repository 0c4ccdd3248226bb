"""
Catalogue of base distributions and matrix families used by the checks,
the verification suites and the tests.
"""
import itertools
from fractions import Fraction

from .matrix_models import (
    DeterminingSeries,
    MatrixFamilySpec,
    build_rcyclic,
    build_uniform_rcyclic,
)
from .opval import BaseAlgebra, DistributionSpec


def semicircular(d=1, K=4):
    """
    kappa_2[x E_m, x] = E_m, every other cumulant 0; the standard semicircular for d=1.
    """
    algebra = BaseAlgebra(d)
    entries = {}
    if K >= 2:
        entries = {((0, 0), (m,)): algebra.basis(m) for m in range(algebra.dimension)}
    return DistributionSpec(algebra, 1, K, entries)


def free_poisson(d=1, K=4):
    """kappa_k[x E_{m_1}, ..., x] = E_{m_1} ... E_{m_{k-1}} for every k."""
    algebra = BaseAlgebra(d)
    entries = {}
    for k in range(1, K + 1):
        for interior in itertools.product(range(algebra.dimension), repeat=k - 1):
            value = algebra.identity()
            for m in interior:
                value = value @ algebra.basis(m)
            entries[((0,) * k, interior)] = value
    return DistributionSpec(algebra, 1, K, entries)


def scaled_semicircular(variance, K=4):
    algebra = BaseAlgebra(1)
    entries = {((0, 0), (0,)): algebra.scalar(variance)} if K >= 2 else {}
    return DistributionSpec(algebra, 1, K, entries)


def constant(alpha, K=4):
    """The scalar alpha as a generator: kappa_1 = alpha, higher cumulants 0."""
    algebra = BaseAlgebra(1)
    return DistributionSpec(algebra, 1, K, {((0,), ()): algebra.scalar(alpha)})


def zero_distribution(s=1, d=1, K=4):
    return DistributionSpec(BaseAlgebra(d), s, K)


def semicircular_pair(covariance, K=4):
    """Two scalar semicirculars with kappa_2[x_a, x_b] = covariance[a][b]."""
    algebra = BaseAlgebra(1)
    entries = {}
    for a in range(2):
        for b in range(2):
            if covariance[a][b] and K >= 2:
                entries[((a, b), (0,))] = algebra.scalar(covariance[a][b])
    return DistributionSpec(algebra, 2, K, entries)


def uniform_semicircular(n, d=1, K=4):
    return build_uniform_rcyclic(semicircular(d, K), n)


def uniform_free_poisson(n, K=4):
    return build_uniform_rcyclic(free_poisson(1, K), n)


def uniform_semicircular_pair(n, K=4):
    return build_uniform_rcyclic(semicircular_pair([[1, Fraction(1, 2)], [Fraction(1, 2), 2]], K), n)


def index_dependent_rcyclic(n, K=4):
    """R-cyclic with kappa_2 cyclic values i_1 + 2 i_2, not exchangeable."""
    algebra = BaseAlgebra(1)

    def theta(rword, iword, interior):
        if len(rword) == 2:
            return algebra.scalar(iword[0] + 2 * iword[1])
        return None

    return build_rcyclic(DeterminingSeries.from_function(algebra, n, 1, K, theta))


def exchangeable_rcyclic(n, K=3):
    """
    R-cyclic with cyclic values depending only on which indices coincide:
    kappa_1 = 1, kappa_2 = 1 + [i_1 = i_2], kappa_3 = [i_1 = i_2 = i_3].
    """
    algebra = BaseAlgebra(1)

    def theta(rword, iword, interior):
        k = len(rword)
        if k == 1:
            return algebra.identity()
        if k == 2:
            return algebra.scalar(1 + (iword[0] == iword[1]))
        if k == 3 and len(set(iword)) == 1:
            return algebra.identity()
        return None

    return build_rcyclic(DeterminingSeries.from_function(algebra, n, 1, K, theta))


def crossing_rcyclic(n, K=4):
    """
    R-cyclic, kernel-dependent only, with kappa_4 supported on the crossing
    index kernel {{1,3},{2,4}}: exchangeable but outside the noncrossing span.
    """
    algebra = BaseAlgebra(1)

    def theta(rword, iword, interior):
        if len(rword) == 4:
            a, b, c, e = iword
            if a == c and b == e and a != b:
                return algebra.identity()
        return None

    return build_rcyclic(DeterminingSeries.from_function(algebra, n, 1, K, theta))


def diagonal_iid(n, K=4):
    """Diagonal entries semicircular of variance 1, off-diagonal cumulants 0."""
    algebra = BaseAlgebra(1)

    def theta(rword, iword, interior):
        if len(rword) == 2 and iword[0] == iword[1]:
            return algebra.identity()
        return None

    return build_rcyclic(DeterminingSeries.from_function(algebra, n, 1, K, theta))


def shifted_diagonal(n, K=4):
    """Uniform semicircular plus a constant diagonal matrix diag(1, ..., n)."""
    family = uniform_semicircular(n, 1, K)
    entries = {(w, m): v for w, m, v in family.entries()}
    algebra = family.algebra
    for i in range(1, n + 1):
        entries[((family.generator(i, i, 0),), ())] = algebra.scalar(i)
    return MatrixFamilySpec(n, 1, algebra, K, entries)


def symmetric_semicircular(n, K=4):
    """
    x_ij = x_ji with free semicircular entries on and above the diagonal.
    """
    algebra = BaseAlgebra(1)
    layout = MatrixFamilySpec(n, 1, algebra, K)
    entries = {}
    for a, b, c, e in itertools.product(range(1, n + 1), repeat=4):
        if K >= 2 and (a, b) in ((c, e), (e, c)):
            entries[((layout.generator(a, b, 0), layout.generator(c, e, 0)), (0,))] = algebra.identity()
    return MatrixFamilySpec(n, 1, algebra, K, entries)


def free_entries(n, K=4):
    """All n² entries free semicirculars, x_ij and x_ji unrelated."""
    algebra = BaseAlgebra(1)
    layout = MatrixFamilySpec(n, 1, algebra, K)
    entries = {
        ((layout.generator(a, b, 0), layout.generator(a, b, 0)), (0,)): algebra.identity()
        for a, b in itertools.product(range(1, n + 1), repeat=2)
        if K >= 2
    }
    return MatrixFamilySpec(n, 1, algebra, K, entries)


def constant_matrix(n, alpha=1, K=4):
    """Every entry equal to the scalar alpha."""
    algebra = BaseAlgebra(1)
    layout = MatrixFamilySpec(n, 1, algebra, K)
    entries = {
        ((layout.generator(a, b, 0),), ()): algebra.scalar(alpha)
        for a, b in itertools.product(range(1, n + 1), repeat=2)
    }
    return MatrixFamilySpec(n, 1, algebra, K, entries)


def perturbed_uniform(n, K=4):
    """Uniform semicircular with an extra kappa_2[x_12, x_12] = 1/3."""
    family = uniform_semicircular(n, 1, K)
    entries = {(w, m): v for w, m, v in family.entries()}
    g = family.generator(1, 2, 0)
    if K >= 2:
        entries[((g, g), (0,))] = family.algebra.scalar(Fraction(1, 3))
    return MatrixFamilySpec(n, 1, family.algebra, K, entries)


def zero_family(n, K=4):
    return MatrixFamilySpec(n, 1, BaseAlgebra(1), K)


# (name, build(n, K), R-cyclic, uniformly R-cyclic)
SUITE_FAMILIES = [
    ('uniform semicircular', lambda n, K: uniform_semicircular(n, 1, K), True, True),
    ('uniform free Poisson', uniform_free_poisson, True, True),
    ('uniform semicircular over M_2', lambda n, K: uniform_semicircular(n, 2, min(K, 3)), True, True),
    ('uniform semicircular pair', uniform_semicircular_pair, True, True),
    ('index-dependent R-cyclic', index_dependent_rcyclic, True, False),
    ('diagonal i.i.d.', diagonal_iid, True, False),
    ('shifted diagonal', shifted_diagonal, True, False),
    ('symmetric semicircular', symmetric_semicircular, False, False),
    ('free entries', free_entries, False, False),
    ('constant matrix', lambda n, K: constant_matrix(n, 1, K), False, False),
    ('perturbed uniform', perturbed_uniform, False, False),
    ('zero', zero_family, True, True),
]
