"""Distance matrices, neighbor graphs, geodesics, and farthest point sampling.

Everything downstream (spectral initialization, persistence, the loss) works
on the types defined here. All operations are pure functions over immutable
inputs and may be called concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.spatial.distance import pdist, squareform

from .errors import DisconnectedGraphError, ParameterError, ValidationError

__all__ = [
    "PointCloud",
    "DistanceMatrix",
    "NeighborGraph",
    "euclidean_distances",
    "knn_graph",
    "geodesic_distances",
    "farthest_point_sample",
    "restrict",
    "component_count",
]


@dataclass(frozen=True)
class PointCloud:
    """n points in an ambient Euclidean space, stored as an (n, D) array."""

    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        if coords.ndim != 2 or coords.shape[0] < 1 or coords.shape[1] < 1:
            raise ValidationError("point cloud must be a non-empty 2-D array")
        if not np.all(np.isfinite(coords)):
            raise ValidationError("point cloud contains non-finite coordinates")
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric nonnegative matrix with zero diagonal."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValidationError("distance matrix must be square")
        if not np.all(np.isfinite(entries)):
            raise ValidationError("distance matrix contains non-finite entries")
        if np.any(entries < 0):
            raise ValidationError("distance matrix contains negative entries")
        if np.any(np.diagonal(entries) != 0.0):
            raise ValidationError("distance matrix diagonal must be zero")
        if not np.array_equal(entries, entries.T):
            raise ValidationError("distance matrix must be symmetric")
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class NeighborGraph:
    """Undirected weighted graph on n vertices, edges stored as (i, j) with i < j."""

    n: int
    edges: np.ndarray  # (E, 2) int, lexicographically sorted rows
    weights: np.ndarray  # (E,) float, the source-metric distance of each pair

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=int).reshape(-1, 2)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if edges.shape[0] != weights.shape[0]:
            raise ValidationError("edge and weight counts differ")
        if edges.size and (np.any(edges[:, 0] >= edges[:, 1]) or np.any(edges < 0)):
            raise ValidationError("edges must be (i, j) pairs with 0 <= i < j")
        if np.any(weights < 0):
            raise ValidationError("edge weights must be nonnegative")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)

    @property
    def edge_count(self) -> int:
        return self.edges.shape[0]


def euclidean_distances(cloud: PointCloud) -> DistanceMatrix:
    """Pairwise Euclidean distances between the rows of the cloud."""
    if cloud.n == 1:
        return DistanceMatrix(np.zeros((1, 1)))
    return DistanceMatrix(squareform(pdist(cloud.coords)))


def _neighbor_lists(entries: np.ndarray, m: int) -> list[np.ndarray]:
    """First m neighbors of each point, ties broken by lower index."""
    n = entries.shape[0]
    order = np.argsort(entries, axis=1, kind="stable")
    out = []
    for i in range(n):
        row = order[i]
        out.append(row[row != i][:m])
    return out


def knn_graph(dist: DistanceMatrix, m: int) -> NeighborGraph:
    """Symmetrized union m-nearest-neighbor graph of a finite metric space.

    Edge {i, j} is present iff j is among i's m nearest neighbors or vice
    versa, weighted by dist[i][j]. Neighbor ties are broken toward the lower
    index so the result is stable under input order.
    """
    n = dist.n
    if not 1 <= m <= n - 1:
        raise ParameterError(f"neighbor count m={m} must satisfy 1 <= m <= {n - 1}")
    pairs = set()
    for i, nbrs in enumerate(_neighbor_lists(dist.entries, m)):
        for j in nbrs:
            pairs.add((min(i, int(j)), max(i, int(j))))
    edges = np.array(sorted(pairs), dtype=int).reshape(-1, 2)
    weights = dist.entries[edges[:, 0], edges[:, 1]]
    return NeighborGraph(n=n, edges=edges, weights=weights)


def _edge_components(n: int, edges: np.ndarray) -> np.ndarray:
    """Component label per vertex via union-find over the edge list."""
    parent = np.arange(n)

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        ri, rj = find(int(i)), find(int(j))
        if ri != rj:
            parent[ri] = rj
    return np.array([find(v) for v in range(n)])


def component_count(graph: NeighborGraph) -> int:
    """Number of connected components of the graph."""
    labels = _edge_components(graph.n, graph.edges)
    return len(np.unique(labels))


def _bridge_components(graph: NeighborGraph, dist: DistanceMatrix) -> NeighborGraph:
    """Connect components with minimum-distance inter-component pairs.

    Greedy MST over the component quotient: repeatedly add the globally
    shortest edge joining two distinct components.
    """
    edges = [tuple(int(v) for v in e) for e in graph.edges]
    weights = list(graph.weights)
    labels = _edge_components(graph.n, graph.edges)
    while len(np.unique(labels)) > 1:
        cross = labels[:, None] != labels[None, :]
        candidates = np.where(cross, dist.entries, np.inf)
        i, j = np.unravel_index(np.argmin(candidates), candidates.shape)
        i, j = int(min(i, j)), int(max(i, j))
        edges.append((i, j))
        weights.append(dist.entries[i, j])
        labels[labels == labels[j]] = labels[i]
    edge_arr = np.array(edges, dtype=int)
    order = np.lexsort((edge_arr[:, 1], edge_arr[:, 0]))
    return NeighborGraph(
        n=graph.n, edges=edge_arr[order], weights=np.array(weights, dtype=float)[order]
    )


def geodesic_distances(
    graph: NeighborGraph,
    *,
    connect: bool = False,
    dist: DistanceMatrix | None = None,
) -> DistanceMatrix:
    """All-pairs shortest-path distances over the weighted neighbor graph.

    Raises DisconnectedGraphError on a disconnected graph unless `connect` is
    set, in which case components are first bridged by the minimum-distance
    inter-component pairs (`dist` supplies those distances).
    """
    n = graph.n

    def as_sparse(g: NeighborGraph):
        # csgraph treats explicit zeros as non-edges; nudge coincident pairs
        w = np.where(g.weights == 0.0, np.nextafter(0.0, 1.0), g.weights)
        return coo_matrix((w, (g.edges[:, 0], g.edges[:, 1])), shape=(n, n)).tocsr()

    g = graph
    sparse = as_sparse(g)
    n_comp, _ = connected_components(sparse, directed=False)
    if n_comp > 1:
        if not connect:
            raise DisconnectedGraphError(n_comp)
        if dist is None:
            raise ParameterError("auto-connect requires the source distance matrix")
        g = _bridge_components(graph, dist)
        sparse = as_sparse(g)
    out = dijkstra(sparse, directed=False)
    # forward/backward path sums can differ in the last ulp; keep the smaller
    out = np.minimum(out, out.T)
    np.fill_diagonal(out, 0.0)
    return DistanceMatrix(out)


def farthest_point_sample(dist: DistanceMatrix, target_size: int, seed: int) -> list[int]:
    """Greedy maximin subsample of the metric space.

    The first index is drawn uniformly from the seed; each subsequent index
    maximizes the distance to the already-selected set, ties broken toward
    the lower index. Returns all indices when target_size >= n.
    """
    if target_size < 1:
        raise ParameterError("target_size must be >= 1")
    n = dist.n
    if target_size >= n:
        return list(range(n))
    rng = np.random.default_rng(seed)
    start = int(rng.integers(n))
    selected = [start]
    mind = dist.entries[start].copy()
    mind[start] = -np.inf
    for _ in range(target_size - 1):
        nxt = int(np.argmax(mind))
        selected.append(nxt)
        mind = np.minimum(mind, dist.entries[nxt])
        mind[nxt] = -np.inf
    return selected


def restrict(dist: DistanceMatrix, subset: "list[int] | np.ndarray") -> DistanceMatrix:
    """Principal submatrix of the metric in subset order."""
    idx = np.asarray(subset, dtype=int).reshape(-1)
    if idx.size == 0:
        raise ParameterError("subset must be non-empty")
    if len(np.unique(idx)) != idx.size:
        raise ParameterError("subset indices must be distinct")
    if np.any(idx < 0) or np.any(idx >= dist.n):
        raise ParameterError("subset index out of range")
    return DistanceMatrix(dist.entries[np.ix_(idx, idx)])
