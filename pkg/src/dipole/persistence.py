"""Vietoris-Rips persistent homology in degrees 0 and 1 with edge provenance.

A simplex enters the filtration at the maximum pairwise distance of its
vertices. Degree 0 comes from a Kruskal sweep (single linkage); degree 1 from
column reduction of the triangle boundary matrix over Z/2, with columns kept
as integer bitmasks. Every finite birth and death records the edge that
realizes it, which is what makes the diagrams differentiable with respect to
the underlying coordinates.

Essential classes are excluded: both diagrams being compared always have
exactly one essential degree-0 bar and none in degree 1 at the 2-skeleton
run to the full diameter, so dropping them keeps Wasserstein costs finite.
Zero-persistence pairs are dropped as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ParameterError
from .geometry import DistanceMatrix

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

__all__ = [
    "PersistencePoint",
    "PersistenceDiagram",
    "rips_h0",
    "rips_h1",
    "rips_diagrams",
    "reduction_oracle",
]


@dataclass(frozen=True)
class PersistencePoint:
    """A finite (birth, death) pair with the edges realizing each coordinate."""

    birth: float
    death: float
    degree: int
    birth_edge: tuple[int, int] | None = None
    death_edge: tuple[int, int] | None = None

    def __post_init__(self):
        if self.death < self.birth:
            raise ParameterError("death must be >= birth")


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of persistence points of one homological degree."""

    degree: int
    points: tuple[PersistencePoint, ...]

    def __post_init__(self):
        if any(p.degree != self.degree for p in self.points):
            raise ParameterError("all points must share the diagram's degree")

    def __len__(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        """(m, 2) array of birth/death coordinates."""
        if not self.points:
            return np.zeros((0, 2))
        return np.array([(p.birth, p.death) for p in self.points], dtype=float)

    def birth_death_multiset(self) -> list[tuple[float, float]]:
        return sorted((p.birth, p.death) for p in self.points)


def _sorted_edges(entries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All edges of the complete graph, ascending by (weight, i, j)."""
    n = entries.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    w = entries[iu, ju]
    order = np.lexsort((ju, iu, w))
    return np.column_stack((iu[order], ju[order])), w[order]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def _h0_from_edges(edges: np.ndarray, weights: np.ndarray, n: int) -> PersistenceDiagram:
    uf = _UnionFind(n)
    points = []
    merges = 0
    for (i, j), w in zip(edges, weights):
        if uf.union(int(i), int(j)):
            merges += 1
            if w > 0.0:
                points.append(
                    PersistencePoint(0.0, float(w), 0, None, (int(i), int(j)))
                )
            if merges == n - 1:
                break
    return PersistenceDiagram(0, tuple(points))


# cached C(n, 3) vertex-index triples, keyed by n
_TRIANGLE_CACHE: dict[int, np.ndarray] = {}


def _triangles(n: int) -> np.ndarray:
    tri = _TRIANGLE_CACHE.get(n)
    if tri is None:
        ai, bi = np.triu_indices(n, k=1)
        reps = n - 1 - bi
        a = np.repeat(ai, reps)
        b = np.repeat(bi, reps)
        c = np.concatenate([np.arange(j + 1, n) for j in bi]) if n >= 3 else np.empty(0, int)
        tri = np.column_stack((a, b, c)).astype(np.int32)
        _TRIANGLE_CACHE[n] = tri
    return tri


def _reduce_triangle_columns_py(
    tri_ranks: np.ndarray, n_edges: int, cycles: int
) -> list[tuple[int, int]]:
    """Column reduction with Python big-int bitmasks (fallback path).

    Columns are indexed by edge rank; a triangle pairs with the edge left as
    its lowest one after cancelling against previously reduced columns.
    """
    pow2 = [1 << i for i in range(n_edges)]
    low_to_col: dict[int, "tuple[int, ...] | int"] = {}
    pair_of: list[tuple[int, int]] = []
    paired = 0
    for t, ranks in enumerate(tri_ranks.tolist()):
        low = max(ranks)
        if low not in low_to_col:
            low_to_col[low] = tuple(ranks)
            pair_of.append((low, t))
            paired += 1
        else:
            mask = pow2[ranks[0]] | pow2[ranks[1]] | pow2[ranks[2]]
            while mask:
                low = mask.bit_length() - 1
                other = low_to_col.get(low)
                if other is None:
                    low_to_col[low] = mask
                    pair_of.append((low, t))
                    paired += 1
                    break
                if isinstance(other, tuple):
                    other = pow2[other[0]] | pow2[other[1]] | pow2[other[2]]
                    low_to_col[low] = other
                mask ^= other
        if paired == cycles:
            break
    return pair_of


if _HAVE_NUMBA:

    @njit(cache=True)
    def _reduce_triangle_columns(tri_ranks, n_edges, cycles):  # pragma: no cover
        """Same reduction with packed uint64 columns, compiled."""
        words = (n_edges + 63) // 64
        cols = np.zeros((n_edges, words), dtype=np.uint64)
        col_top = np.zeros(n_edges, dtype=np.int64)
        has_col = np.zeros(n_edges, dtype=np.bool_)
        pairs = np.empty((cycles, 2), dtype=np.int64)
        paired = 0
        cur = np.zeros(words, dtype=np.uint64)
        one = np.uint64(1)
        zero = np.uint64(0)
        for t in range(tri_ranks.shape[0]):
            top = 0
            for s in range(3):
                r = tri_ranks[t, s]
                w = r >> 6
                cur[w] |= one << np.uint64(r & 63)
                if w > top:
                    top = w
            while True:
                low = -1
                w = top
                while w >= 0:
                    if cur[w] != zero:
                        v = cur[w]
                        bit = 0
                        while v > one:
                            v >>= one
                            bit += 1
                        low = (w << 6) + bit
                        top = w
                        break
                    w -= 1
                if low < 0:
                    break
                if not has_col[low]:
                    has_col[low] = True
                    col_top[low] = top
                    for w in range(top + 1):
                        cols[low, w] = cur[w]
                    pairs[paired, 0] = low
                    pairs[paired, 1] = t
                    paired += 1
                    break
                for w in range(col_top[low] + 1):
                    cur[w] ^= cols[low, w]
            for w in range(top + 1):
                cur[w] = zero
            if paired == cycles:
                break
        return pairs[:paired]


def _h1_from_edges(
    entries: np.ndarray, edges: np.ndarray, weights: np.ndarray
) -> PersistenceDiagram:
    n = entries.shape[0]
    if n < 3:
        return PersistenceDiagram(1, ())
    n_edges = edges.shape[0]

    rank = np.empty((n, n), dtype=np.int64)
    r = np.arange(n_edges)
    rank[edges[:, 0], edges[:, 1]] = r
    rank[edges[:, 1], edges[:, 0]] = r

    tri = _triangles(n)
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    # per-triangle edge weights in lexicographic edge order (a,b),(a,c),(b,c)
    ew = np.column_stack((entries[a, b], entries[a, c], entries[b, c]))
    tri_f = ew.max(axis=1)
    max_slot = ew.argmax(axis=1)  # first maximum picks the lex-smallest edge

    order = np.lexsort((c, b, a, tri_f))
    tri = tri[order]
    tri_f = tri_f[order]
    max_slot = max_slot[order]
    tri_ranks = np.column_stack(
        (
            rank[tri[:, 0], tri[:, 1]],
            rank[tri[:, 0], tri[:, 2]],
            rank[tri[:, 1], tri[:, 2]],
        )
    )

    cycles = n_edges - (n - 1)
    if _HAVE_NUMBA:
        pair_arr = _reduce_triangle_columns(
            np.ascontiguousarray(tri_ranks, dtype=np.int64), n_edges, cycles
        )
        pair_of = [(int(e), int(t)) for e, t in pair_arr]
    else:
        pair_of = _reduce_triangle_columns_py(tri_ranks, n_edges, cycles)

    edge_slots = ((0, 1), (0, 2), (1, 2))
    points = []
    for erank, t in pair_of:
        birth = float(weights[erank])
        death = float(tri_f[t])
        if death > birth:
            ia, ib = edge_slots[max_slot[t]]
            death_edge = (int(tri[t, ia]), int(tri[t, ib]))
            birth_edge = (int(edges[erank, 0]), int(edges[erank, 1]))
            points.append(PersistencePoint(birth, death, 1, birth_edge, death_edge))
    return PersistenceDiagram(1, tuple(points))


def rips_diagrams(dist: DistanceMatrix, max_degree: int) -> dict[int, PersistenceDiagram]:
    """Rips persistence diagrams up to the requested degree (0 or 1)."""
    if max_degree not in (0, 1):
        raise ParameterError("max_degree must be 0 or 1")
    edges, weights = _sorted_edges(dist.entries)
    out = {0: _h0_from_edges(edges, weights, dist.n)}
    if max_degree >= 1:
        out[1] = _h1_from_edges(dist.entries, edges, weights)
    return out


def rips_h0(dist: DistanceMatrix) -> PersistenceDiagram:
    """Degree-0 Rips persistence: one point per positive MST edge weight."""
    edges, weights = _sorted_edges(dist.entries)
    return _h0_from_edges(edges, weights, dist.n)


def rips_h1(dist: DistanceMatrix) -> PersistenceDiagram:
    """Degree-1 Rips persistence of the 2-skeleton."""
    edges, weights = _sorted_edges(dist.entries)
    return _h1_from_edges(dist.entries, edges, weights)


_ORACLE_MAX_POINTS = 10


def reduction_oracle(dist: DistanceMatrix, max_degree: int) -> dict[int, PersistenceDiagram]:
    """Textbook dense boundary-matrix reduction over Z/2, for test scale only.

    Builds the full sorted simplex list (vertices, edges, and triangles when
    max_degree is 1), reduces the dense boundary matrix column by column with
    no optimizations, and reads persistence pairs off the lowest ones. Shares
    no machinery with rips_diagrams beyond the input type.
    """
    if max_degree not in (0, 1):
        raise ParameterError("max_degree must be 0 or 1")
    n = dist.n
    if n > _ORACLE_MAX_POINTS:
        raise ParameterError(f"reduction oracle is capped at n <= {_ORACLE_MAX_POINTS}")
    d = dist.entries

    simplices: list[tuple[float, int, tuple[int, ...]]] = []
    for v in range(n):
        simplices.append((0.0, 0, (v,)))
    for i, j in combinations(range(n), 2):
        simplices.append((float(d[i, j]), 1, (i, j)))
    if max_degree >= 1:
        for i, j, k in combinations(range(n), 3):
            f = max(float(d[i, j]), float(d[i, k]), float(d[j, k]))
            simplices.append((f, 2, (i, j, k)))
    simplices.sort(key=lambda s: (s[0], s[1], s[2]))
    index_of = {s[2]: idx for idx, s in enumerate(simplices)}

    size = len(simplices)
    boundary = np.zeros((size, size), dtype=bool)
    for j, (_, dim, verts) in enumerate(simplices):
        if dim == 0:
            continue
        for face in combinations(verts, dim):
            boundary[index_of[face], j] = True

    lows: dict[int, int] = {}
    pairs: list[tuple[int, int]] = []
    for j in range(size):
        while True:
            nz = np.flatnonzero(boundary[:, j])
            if nz.size == 0:
                break
            low = int(nz[-1])
            k = lows.get(low)
            if k is None:
                lows[low] = j
                pairs.append((low, j))
                break
            boundary[:, j] ^= boundary[:, k]

    points: dict[int, list[PersistencePoint]] = {0: [], 1: []}
    for i, j in pairs:
        f_i, dim_i, verts_i = simplices[i]
        f_j, _, verts_j = simplices[j]
        if f_j <= f_i:
            continue
        if dim_i == 0:
            points[0].append(PersistencePoint(0.0, f_j, 0, None, verts_j))
        elif dim_i == 1:
            tri_edges = [tuple(sorted(e)) for e in combinations(verts_j, 2)]
            death_edge = next(e for e in tri_edges if float(d[e[0], e[1]]) == f_j)
            points[1].append(PersistencePoint(f_i, f_j, 1, verts_i, death_edge))

    out = {0: PersistenceDiagram(0, tuple(points[0]))}
    if max_degree >= 1:
        out[1] = PersistenceDiagram(1, tuple(points[1]))
    return out
