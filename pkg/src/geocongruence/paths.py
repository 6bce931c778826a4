"""Topological shortest paths (TSP), geometrical shortest paths (GSP) and
exhaustive enumeration of every TSP between a pair of nodes.

Enumeration walks the shortest-path DAG towards the target: from a node at
hop distance k from the target only neighbours at distance k - 1 are
followed.  The resulting set equals that of the plain depth-limited
recursion (every simple path of exactly L hops), without its exponential
dead-end exploration.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import CapExceeded, DataError, DomainError

log = logging.getLogger(__name__)

DEFAULT_PATH_CAP = 10**6


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Simple undirected graph whose edge weights are distances.

    ``weights[i, j]`` is meaningful only where ``adjacency[i, j]`` is True.
    """

    adjacency: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=bool)
        w = np.asarray(self.weights, dtype=float)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or w.shape != adj.shape:
            raise DataError("adjacency and weights must be square matrices of equal shape")
        if np.any(np.diag(adj)):
            raise DataError("self-loops are not allowed")
        if not np.array_equal(adj, adj.T):
            raise DataError("adjacency must be symmetric")
        ew = w[adj]
        if not np.all(np.isfinite(ew)) or np.any(ew <= 0):
            raise DataError("edge weights must be positive and finite")
        if not np.array_equal(np.where(adj, w, 0.0), np.where(adj, w, 0.0).T):
            raise DataError("edge weights must be symmetric")
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "weights", np.where(adj, w, 0.0))

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency, 1)))

    def neighbors(self) -> list[list[int]]:
        return [np.flatnonzero(row).tolist() for row in self.adjacency]

    def subgraph(self, nodes) -> "WeightedGraph":
        idx = np.asarray(nodes)
        return WeightedGraph(self.adjacency[np.ix_(idx, idx)], self.weights[np.ix_(idx, idx)])


def geodesic_weighted(adjacency, geodesics) -> WeightedGraph:
    """Weight every edge by the latent distance between its endpoints."""
    adj = np.asarray(adjacency, dtype=bool)
    return WeightedGraph(adj, np.where(adj, np.asarray(getattr(geodesics, "d", geodesics)), 0.0))


@dataclass(frozen=True)
class PathEnumeration:
    source: int
    target: int
    length: int
    paths: list[tuple[int, ...]]


@dataclass(frozen=True, slots=True)
class PairRecord:
    """Per nonadjacent pair summary; projections are summed edge weights."""

    i: int
    j: int
    tsp_len: int
    n_tsp: int
    mean_ptsp: float
    min_ptsp: float
    max_ptsp: float
    gsp: float
    geo: float | None = None


def tsp_lengths(adjacency) -> np.ndarray:
    """Hop counts of topological shortest paths; ``inf`` for disconnected pairs.

    Returned as a float array (integral values) so the infinity sentinel fits.
    """
    adj = csr_matrix(np.asarray(adjacency, dtype=bool).astype(float))
    return shortest_path(adj, method="D", directed=False, unweighted=True)


def gsp_lengths(graph: WeightedGraph) -> np.ndarray:
    """Minimum total edge weight between every pair (Dijkstra from each source)."""
    return shortest_path(csr_matrix(graph.weights), method="D", directed=False)


def enumerate_tsp(neighbors, source: int, target: int, length: int, tsp_matrix,
                  cap: int | None = DEFAULT_PATH_CAP) -> PathEnumeration:
    """Every simple path of exactly ``length`` hops from ``source`` to ``target``.

    ``length`` must equal ``tsp_matrix[source, target]``.  Neighbours are
    visited in ascending id so the output order is deterministic.
    """
    if not np.isfinite(tsp_matrix[source, target]) or tsp_matrix[source, target] != length:
        raise DomainError(
            f"path length {length} is not the topological distance between {source} and {target}")
    paths = _walk_dag(source, target, int(length), neighbors, tsp_matrix[:, target], {}, cap)
    return PathEnumeration(source, target, int(length), paths)


def _walk_dag(source, target, length, neighbors, to_target, succ, cap):
    # succ caches DAG successor lists; valid for every source sharing this target
    paths: list[tuple[int, ...]] = []
    stack = [source]

    def descend(u, remaining):
        if remaining == 0:
            if cap is not None and len(paths) >= cap:
                raise CapExceeded(source, target, cap)
            paths.append(tuple(stack))
            return
        s = succ.get(u)
        if s is None:
            s = succ[u] = [v for v in sorted(neighbors[u]) if to_target[v] == remaining - 1]
        for v in s:
            stack.append(v)
            descend(v, remaining - 1)
            stack.pop()

    descend(source, length)
    return paths


def path_weight(path, weights) -> float:
    """Projection of a path: the sum of its edge weights (matrix or nested lists)."""
    return float(sum(weights[a][b] for a, b in zip(path[:-1], path[1:])))


def mean_ptsp(enumeration: PathEnumeration, weights) -> float:
    """Mean projection (summed edge weights) over the enumerated paths."""
    if not enumeration.paths:
        raise DomainError("mean projection of an empty path enumeration")
    w = weights.weights if isinstance(weights, WeightedGraph) else np.asarray(weights)
    return float(np.mean([path_weight(p, w) for p in enumeration.paths]))


def giant_component(adjacency) -> np.ndarray:
    """Sorted node ids of the largest connected component (ties -> lowest label)."""
    ncomp, labels = connected_components(csr_matrix(np.asarray(adjacency, dtype=float)), directed=False)
    if ncomp == 1:
        return np.arange(len(labels))
    sizes = np.bincount(labels)
    return np.flatnonzero(labels == int(np.argmax(sizes)))


@dataclass
class PairSweep:
    """Records over nonadjacent pairs plus bookkeeping of what was skipped."""

    records: list[PairRecord]
    n_nodes: int
    n_edges: int
    disconnected_pairs: int = 0


def pair_records(graph, geodesics=None, cap: int | None = DEFAULT_PATH_CAP) -> PairSweep:
    """Summaries for every unordered nonadjacent pair i < j.

    ``graph`` is a :class:`WeightedGraph` or a generated network (weighted by
    its geodesics, which then also fill the ``geo`` field).  Pairs in
    different components are skipped and counted.
    """
    if not isinstance(graph, WeightedGraph):
        if geodesics is None:
            geodesics = graph.geodesics.d
        graph = geodesic_weighted(graph.adjacency, geodesics)
    geo = None if geodesics is None else np.asarray(getattr(geodesics, "d", geodesics))
    n = graph.n
    w = graph.weights.tolist()
    nbrs = graph.neighbors()
    tsp = tsp_lengths(graph.adjacency)
    gsp = gsp_lengths(graph)

    records = []
    disconnected = 0
    for j in range(n):
        to_target = tsp[:, j]
        succ: dict[int, list[int]] = {}
        for i in range(j):
            L = to_target[i]
            if L <= 1:
                continue
            if not np.isfinite(L):
                disconnected += 1
                continue
            paths = _walk_dag(i, j, int(L), nbrs, to_target, succ, cap)
            projections = [path_weight(path, w) for path in paths]
            records.append(PairRecord(
                i=i, j=j, tsp_len=int(L), n_tsp=len(projections),
                mean_ptsp=float(np.mean(projections)),
                min_ptsp=min(projections), max_ptsp=max(projections),
                gsp=float(gsp[i, j]),
                geo=None if geo is None else float(geo[i, j]),
            ))
    if disconnected:
        log.warning("excluded %d disconnected nonadjacent pairs", disconnected)
    records.sort(key=lambda rec: (rec.i, rec.j))
    return PairSweep(records, n, graph.n_edges, disconnected)

