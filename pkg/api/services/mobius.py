"""
Möbius function of the noncrossing partition lattice.
"""
import logging
from fractions import Fraction
from functools import lru_cache

from .errors import SizeMismatch
from .partitions import (
    PartitionFamily,
    enumerate_partitions,
    is_leq,
    require_noncrossing,
)

logger = logging.getLogger(__name__)


@lru_cache(maxsize=256)
def _mobius_from(sigma):
    """
    mu(sigma, .) on the whole up-set of sigma in NC(k).

    Solves sum_{sigma <= tau <= pi} mu(sigma, tau) = delta(sigma, pi) in
    order of decreasing block count, so every tau below pi is settled first.
    """
    upset = [pi for pi in enumerate_partitions(PartitionFamily.NC, sigma.k) if is_leq(sigma, pi)]
    upset.sort(key=lambda pi: -pi.block_count)
    values = {}
    for position, pi in enumerate(upset):
        if pi == sigma:
            values[pi] = 1
            continue
        total = 0
        for tau in upset[:position]:
            if tau.block_count > pi.block_count and is_leq(tau, pi):
                total += values[tau]
        values[pi] = -total
    logger.debug(f"Möbius table from {sigma} covers {len(values)} partitions")
    return values


def mobius(sigma, pi):
    """
    mu_k(sigma, pi) on NC(k); 0 unless sigma <= pi.
    """
    if sigma.k != pi.k:
        raise SizeMismatch(f"partitions of {sigma.k} and {pi.k} points")
    require_noncrossing(sigma)
    require_noncrossing(pi)
    if not is_leq(sigma, pi):
        return 0
    return _mobius_from(sigma)[pi]


def zeta_transform(f, k):
    """g(pi) = sum over sigma <= pi of f(sigma), on NC(k)."""
    lattice = enumerate_partitions(PartitionFamily.NC, k)
    return {
        pi: sum((Fraction(f[sigma]) for sigma in lattice if is_leq(sigma, pi)), Fraction(0))
        for pi in lattice
    }


def mobius_transform(g, k):
    """f(pi) = sum over sigma <= pi of mu(sigma, pi) g(sigma), on NC(k)."""
    lattice = enumerate_partitions(PartitionFamily.NC, k)
    return {
        pi: sum(
            (mobius(sigma, pi) * Fraction(g[sigma]) for sigma in lattice if is_leq(sigma, pi)),
            Fraction(0),
        )
        for pi in lattice
    }


def mobius_inversion_check(f, g, k):
    """
    True iff g is the zeta transform of f and f the Möbius transform of g.

    ``f`` and ``g`` map every partition of NC(k) to a rational.
    """
    lattice = enumerate_partitions(PartitionFamily.NC, k)
    missing = [pi for pi in lattice if pi not in f or pi not in g]
    if missing:
        raise SizeMismatch(f"maps are not total on NC({k}): {missing[0]} is missing")
    summed = zeta_transform(f, k)
    inverted = mobius_transform(g, k)
    zeta_holds = all(summed[pi] == g[pi] for pi in lattice)
    mobius_holds = all(inverted[pi] == f[pi] for pi in lattice)
    if zeta_holds != mobius_holds:
        logger.error(f"Zeta and Möbius conditions disagree on NC({k})")
    return zeta_holds and mobius_holds
