"""Dense numpy kernels: Boolean relation algebra and min-plus shortest paths."""
import logging

import numpy as np

logger = logging.getLogger(__name__)


def identity(n):
    return np.eye(n, dtype=bool)


def bool_product(*factors):
    """Composition of Boolean relations given as square matrices."""
    result = factors[0]
    for factor in factors[1:]:
        result = (result.astype(np.int64) @ factor.astype(np.int64)) > 0
    return result


def least_fixpoint(step, start):
    """Iterate ``step`` from ``start`` until the Boolean array stops changing."""
    current = start.copy()
    while True:
        following = step(current)
        if np.array_equal(following, current):
            return current
        current = following


def reflexive_transitive_closure(relation):
    """Pairs connected by a path of length 0 or more, by repeated squaring."""
    return least_fixpoint(lambda x: x | bool_product(x, x), identity(len(relation)) | relation)


def transitive_closure(relation):
    """Pairs connected by a path of length 1 or more."""
    return bool_product(relation, reflexive_transitive_closure(relation))


def forward_reachable(relation, sources):
    """Mask of states reachable (in zero or more steps) from the ``sources`` mask."""
    reached = sources.copy()
    frontier = sources.copy()
    while frontier.any():
        frontier = relation[frontier].any(axis=0) & ~reached
        reached |= frontier
    return reached


def floyd_warshall(weights, floor=None):
    """
    All-pairs shortest walk weights.

    Args:
        weights: Float matrix, ``np.inf`` where there is no edge
        floor: Lower clamp applied after every relaxation round (keeps values of
            walks through negative cycles bounded)

    Returns:
        Matrix of shortest walk weights with a 0 diagonal; pairs connected through a
        reachable negative cycle are ``-np.inf``
    """
    n = len(weights)
    dist = np.array(weights, dtype=float)
    np.fill_diagonal(dist, np.minimum(np.diag(dist), 0.0))
    for k in range(n):
        dist = np.minimum(dist, dist[:, k:k + 1] + dist[k:k + 1, :])
        if floor is not None:
            dist = np.maximum(dist, floor)
    negative = np.diag(dist) < 0
    if negative.any():
        finite = dist < np.inf
        through = bool_product(finite[:, negative], finite[negative, :])
        dist[through] = -np.inf
    return dist


def threshold_reachability(weights, bound, floor):
    """
    Pairs (source, target) joined by a walk whose every prefix weighs strictly less than ``bound``.

    Bellman-Ford from every source at once over a float weight matrix, relaxing only
    through values below ``bound``. A lower weight at a state always dominates, and values
    are clamped at ``floor`` so negative cycles saturate instead of diverging.

    Returns:
        Boolean matrix ``below[source, target]``
    """
    n = len(weights)
    dist = np.full((n, n), np.inf)
    if 0 < bound:
        np.fill_diagonal(dist, 0.0)
    while True:
        following = dist.copy()
        for j in range(n):
            candidate = dist[:, j:j + 1] + weights[j:j + 1, :]
            candidate[candidate >= bound] = np.inf
            following = np.minimum(following, candidate)
        following = np.maximum(following, floor)
        if np.array_equal(following, dist):
            break
        dist = following
    return dist < bound
