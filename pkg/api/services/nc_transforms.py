"""
Fattening calculus on noncrossing partitions.

Points are 1-based. Partitions of {1,...,k} are lifted to {1,...,2k} by
sending point l to the pair (2l-1, 2l).
"""
import logging

from .errors import NotAPairing, NotEvenBlocks, SizeMismatch
from .partitions import (
    SetPartition,
    enumerate_partitions,
    is_noncrossing,
    is_leq,
    join,
    kernel,
    require_noncrossing,
    restrict,
    PartitionFamily,
)

logger = logging.getLogger(__name__)


def fatten(pi):
    """
    Noncrossing pairing of 2k points attached to pi in NC(k).

    A block i_1 < ... < i_s contributes (2i_1-1, 2i_s) and the pairs
    (2i_t, 2i_{t+1}-1) between consecutive elements.
    """
    require_noncrossing(pi)
    pairs = []
    for block in pi.blocks:
        pairs.append((2 * block[0] - 1, 2 * block[-1]))
        for left, right in zip(block, block[1:]):
            pairs.append((2 * left, 2 * right - 1))
    return SetPartition.from_blocks(pairs, 2 * pi.k)


def hat(pi):
    return kernel(label for label in pi.rgs for _ in range(2))


def inverse_fatten(sigma):
    """
    The unique tau in NC(k) with join(sigma, hat(0_k)) == hat(tau).
    """
    if sigma.k % 2 or any(size != 2 for size in sigma.block_sizes()):
        raise NotAPairing(f"{sigma} is not a pairing of an even ground set")
    require_noncrossing(sigma)
    k = sigma.k // 2
    joined = join(sigma, hat(SetPartition.zero(k)))
    return kernel(joined.rgs[2 * l] for l in range(k))


def shift_left(pi):
    """s ~ t in the result iff s+1 ~ t+1 in pi, positions taken mod k."""
    k = pi.k
    return kernel(pi.rgs[(s + 1) % k] for s in range(k))


def shift_right(pi):
    k = pi.k
    return kernel(pi.rgs[(s - 1) % k] for s in range(k))


def wreath(pi, sigma):
    """Partition of 2k points: odd positions follow pi, even positions follow sigma."""
    if pi.k != sigma.k:
        raise SizeMismatch(f"partitions of {pi.k} and {sigma.k} points")
    labels = []
    for odd, even in zip(pi.rgs, sigma.rgs):
        labels.append(('odd', odd))
        labels.append(('even', even))
    return kernel(labels)


def _successor(pi):
    """The permutation of 0..k-1 cycling each block in increasing order."""
    successor = [0] * pi.k
    for block in pi.blocks:
        for current, following in zip(block, block[1:] + block[:1]):
            successor[current - 1] = following - 1
    return successor


def _cycles(permutation):
    labels = [None] * len(permutation)
    for start in range(len(permutation)):
        if labels[start] is None:
            point = start
            while labels[point] is None:
                labels[point] = start
                point = permutation[point]
    return kernel(labels)


def kreweras(pi):
    """
    Kreweras complement, the largest sigma in NC(k) with wreath(pi, sigma)
    noncrossing, read off as the cycles of pi^{-1} gamma with gamma = (1 2 ... k).
    """
    require_noncrossing(pi)
    k = pi.k
    successor = _successor(pi)
    inverse = [0] * k
    for point, image in enumerate(successor):
        inverse[image] = point
    return _cycles([inverse[(point + 1) % k] for point in range(k)])


def kreweras_inverse(rho):
    require_noncrossing(rho)
    k = rho.k
    successor = _successor(rho)
    inverse = [0] * k
    for point, image in enumerate(successor):
        inverse[image] = point
    return _cycles([(inverse[point] + 1) % k for point in range(k)])


def nch_decompose(tau):
    """
    Split tau in NC_h(2k) into pi_1 <= pi_2 in NC(k) with
    join(fatten(pi_1), fatten(pi_2)) == tau.

    K(tau) is pi_1 on the odd points and K(pi_2) on the even points.
    """
    if tau.k % 2 or any(size % 2 for size in tau.block_sizes()):
        raise NotEvenBlocks(f"{tau} has a block of odd size")
    require_noncrossing(tau)
    complement = kreweras(tau)
    odd = restrict(complement, range(1, tau.k + 1, 2))
    even = restrict(complement, range(2, tau.k + 1, 2))
    return odd, kreweras_inverse(even)


def kreweras_by_search(pi):
    """
    Kreweras complement by exhaustive search over NC(k); exponential.
    """
    require_noncrossing(pi)
    best = None
    for sigma in enumerate_partitions(PartitionFamily.NC, pi.k):
        if is_noncrossing(wreath(pi, sigma)):
            if best is None or is_leq(best, sigma):
                best = sigma
    return best
