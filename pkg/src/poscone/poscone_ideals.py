"""poscone_ideals.py: closed invariant ideals of positive operators via the support digraph."""

import logging
import math

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .poscone_core import TruncatedPositiveOperator

_LOGGER = logging.getLogger(__name__)


##
## Support digraph: arc l -> k iff <e_k*, T e_l> > tol_abs
##
@dataclass(frozen=True)
class SupportDigraph:
    dim: int
    arcs: frozenset[tuple[int, int]]

    def adjacency(self) -> csr_matrix:
        """adjacency[l, k] = 1 for every arc l -> k"""
        if self.arcs:
            src, dst = zip(*sorted(self.arcs))
        else:
            src, dst = (), ()
        data = np.ones(len(src))
        return csr_matrix((data, (np.asarray(src, dtype=int), np.asarray(dst, dtype=int))), shape=(self.dim, self.dim))

    def successors(self, l: int) -> list[int]:
        return sorted(k for (s, k) in self.arcs if s == l)

    def distances(self) -> np.ndarray:
        """Length of the shortest path i -> j (inf if unreachable, 0 on the diagonal)"""
        return shortest_path(self.adjacency(), method='D', directed=True, unweighted=True)

    def reachable(self, i: int) -> list[int]:
        """Coordinates reachable from i, i itself included"""
        dist = shortest_path(self.adjacency(), method='D', directed=True, unweighted=True, indices=i)
        return [int(k) for k in np.flatnonzero(np.isfinite(dist))]

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "arcs": [list(a) for a in sorted(self.arcs)],
        }


@dataclass
class IdealReport:
    dim: int                                        # truncation dim, no claim about the infinite operator
    irreducible: bool
    failing_pair: tuple[int, int] | None = None
    witness_powers: dict[tuple[int, int], int] = field(default_factory=dict)
    invariant_ideal_support: list[int] | None = None

    def to_dict(self) -> dict:
        return {
            "truncation_dim": self.dim,
            "irreducible": self.irreducible,
            "failing_pair": list(self.failing_pair) if self.failing_pair else None,
            "witness_powers": {f"{i},{j}": n for (i, j), n in sorted(self.witness_powers.items())},
            "invariant_ideal_support": self.invariant_ideal_support,
        }


def supportDigraph(T: TruncatedPositiveOperator) -> SupportDigraph:
    """Thresholded support pattern of T"""
    rows, cols = np.nonzero(T.entries > T.space.tol_abs)
    return SupportDigraph(T.dim, frozenset((int(l), int(k)) for k, l in zip(rows, cols)))


def rtCriterion(T: TruncatedPositiveOperator) -> IdealReport:
    """
    T has no non-trivial closed invariant ideal iff for all i != j there is n with
    <e_j*, T^n e_i> > 0, i.e. iff the support digraph is strongly connected.
    The smallest such n is the shortest path length i -> j.
    On failure the coordinates reachable from i span an invariant ideal missing e_j.
    """
    graph = supportDigraph(T)
    adjacency = graph.adjacency()
    n_components, _ = connected_components(adjacency, directed=True, connection='strong')
    dist = graph.distances()

    witness_powers = {}
    failing_pair = None
    for i in range(T.dim):
        for j in range(T.dim):
            if i == j:
                continue
            if math.isfinite(dist[i, j]):
                witness_powers[(i, j)] = int(dist[i, j])
            elif failing_pair is None:
                failing_pair = (i, j)

    if failing_pair is None:
        _LOGGER.debug(f"Support digraph of dim {T.dim} is strongly connected")
        return IdealReport(T.dim, True, None, witness_powers, None)

    i, j = failing_pair
    support = [int(k) for k in np.flatnonzero(np.isfinite(dist[i]))]
    _LOGGER.debug(f"Support digraph of dim {T.dim} has {n_components} strong components; {j} unreachable from {i}")
    return IdealReport(T.dim, False, failing_pair, witness_powers, support)


def hasDisjointColumnSupports(T: TruncatedPositiveOperator) -> bool:
    """
    True iff the columns T e_i have mutually disjoint supports,
    a necessary condition for T to be a positive isometry.
    """
    pattern = (T.entries > T.space.tol_abs).astype(int)
    overlap = pattern.T @ pattern
    np.fill_diagonal(overlap, 0)
    return not overlap.any()
