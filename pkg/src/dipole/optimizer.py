"""The combined embedding loss and its stochastic subgradient descent loop.

The loss on an embedding is

    (1 - alpha)/2 * T + alpha * M

where M sums squared discrepancies between target and embedded distances over
a fixed set of neighbor pairs, and T averages, over size-k subsets, the
squared 2-Wasserstein distances between the Rips diagrams of the subset under
the target metric and under the embedding (degrees 0..max_degree summed).
Each descent step samples a fresh batch of subsets, takes a subgradient step
with an annealed step size, and re-centers the point cloud; both loss terms
are translation invariant, so centering commutes with the update.
"""

from __future__ import annotations

import logging
from concurrent.futures import Executor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import ParameterError
from .geometry import DistanceMatrix, NeighborGraph, component_count, knn_graph
from .isomap import Embedding
from .persistence import rips_diagrams
from .wasserstein import matching_subgradient, wasserstein_pp

__all__ = [
    "DipoleConfig",
    "LossBreakdown",
    "OptimizerState",
    "lmr_pairs",
    "lmr_loss_grad",
    "topo_loss_grad",
    "dipole_loss",
    "sgd_step",
    "run",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DipoleConfig:
    """All hyperparameters of the loss and the descent loop."""

    alpha: float  # tradeoff between the metric (1.0) and topological (0.0) ends
    k: int  # subset size for the topological term
    lr: float
    m2: int  # neighbor count defining the metric-regularizer pair set
    seed: int
    batch_size: int = 1  # subsets sampled per step
    p: float = 2.0  # Wasserstein order
    max_degree: int = 1  # homology ceiling, 0 or 1
    steps: int = 2500
    anneal_const: float = 1000.0
    schedule: str = "anneal"  # "anneal": lr*c/(c+step); "inverse": lr/(1+step)

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ParameterError("alpha must lie in [0, 1]")
        if self.k < 2:
            raise ParameterError("subset size k must be >= 2")
        if self.batch_size < 1:
            raise ParameterError("batch_size must be >= 1")
        if self.lr <= 0:
            raise ParameterError("learning rate must be positive")
        if self.steps < 0:
            raise ParameterError("steps must be >= 0")
        if self.p < 1:
            raise ParameterError("Wasserstein order p must be >= 1")
        if self.max_degree not in (0, 1):
            raise ParameterError("max_degree must be 0 or 1")
        if self.anneal_const <= 0:
            raise ParameterError("anneal_const must be positive")
        if self.m2 < 1:
            raise ParameterError("m2 must be >= 1")
        if self.schedule not in ("anneal", "inverse"):
            raise ParameterError("schedule must be 'anneal' or 'inverse'")

    def step_size(self, step: int) -> float:
        """Step size at a given (0-based) step count.

        Both schedules are square summable but not summable, the standard
        stochastic-approximation condition.
        """
        if self.schedule == "inverse":
            return self.lr / (1.0 + step)
        return self.lr * self.anneal_const / (self.anneal_const + step)


@dataclass(frozen=True)
class LossBreakdown:
    """One loss evaluation: total = (1-alpha)/2 * topological + alpha * metric."""

    total: float
    topological: float
    metric: float
    per_degree: tuple[float, ...]


@dataclass
class OptimizerState:
    """Mutable descent state; sgd_step updates it in place and returns it."""

    embedding: Embedding
    step: int
    rng: np.random.Generator
    trace: list[LossBreakdown] = field(default_factory=list)


def lmr_pairs(
    dist_source: DistanceMatrix, m2: int, radius: float | None = None
) -> NeighborGraph:
    """Neighbor-pair set for the metric regularizer, weights = source distances.

    Default mode takes the symmetrized m2-nearest-neighbor pairs; passing a
    radius switches to the ball mode (all pairs within that distance). Logs a
    warning when the pair graph is disconnected, since the descent guarantees
    assume a connected pair set.
    """
    if radius is not None:
        if radius <= 0:
            raise ParameterError("radius must be positive")
        iu, ju = np.triu_indices(dist_source.n, k=1)
        keep = dist_source.entries[iu, ju] <= radius
        edges = np.column_stack((iu[keep], ju[keep]))
        graph = NeighborGraph(
            n=dist_source.n, edges=edges, weights=dist_source.entries[iu[keep], ju[keep]]
        )
    else:
        graph = knn_graph(dist_source, m2)
    n_comp = component_count(graph)
    if n_comp > 1:
        logger.warning("metric-regularizer pair graph has %d components", n_comp)
    return graph


def lmr_loss_grad(
    embedding: Embedding, pairs: NeighborGraph
) -> tuple[float, np.ndarray]:
    """Metric-regularizer loss and its gradient per embedded point.

    Loss is the sum over pairs of (d_target - ||a_i - a_j||)^2. Pairs whose
    embedded points coincide contribute zero gradient (a valid subgradient
    choice that avoids dividing by zero).
    """
    y = embedding.coords
    grads = np.zeros_like(y)
    if pairs.edge_count == 0:
        return 0.0, grads
    i, j = pairs.edges[:, 0], pairs.edges[:, 1]
    diff = y[i] - y[j]
    r = np.linalg.norm(diff, axis=1)
    res = pairs.weights - r
    loss = float(np.sum(res**2))
    safe = r > 0
    coef = np.where(safe, -2.0 * res / np.where(safe, r, 1.0), 0.0)
    contrib = coef[:, None] * diff
    np.add.at(grads, i, contrib)
    np.add.at(grads, j, -contrib)
    return loss, grads


def _subset_terms(
    y: np.ndarray,
    target_entries: np.ndarray,
    subset: np.ndarray,
    cfg: DipoleConfig,
    with_grad: bool,
) -> tuple[list[float], np.ndarray | None]:
    """Per-degree Wasserstein costs for one subset, plus local coordinate grads."""
    k = subset.size
    ys = y[subset]
    emb_entries = squareform(pdist(ys)) if k > 1 else np.zeros((1, 1))
    target_dgms = rips_diagrams(
        DistanceMatrix(target_entries[np.ix_(subset, subset)]), cfg.max_degree
    )
    emb_dgms = rips_diagrams(DistanceMatrix(emb_entries), cfg.max_degree)

    costs = []
    local = np.zeros_like(ys) if with_grad else None
    for degree in range(cfg.max_degree + 1):
        cost, match = wasserstein_pp(target_dgms[degree], emb_dgms[degree], cfg.p)
        costs.append(cost)
        if not with_grad or cost == 0.0:
            continue
        plane = matching_subgradient(target_dgms[degree], emb_dgms[degree], match, cfg.p)
        for point, (g_birth, g_death) in zip(emb_dgms[degree].points, plane):
            for g, edge in ((g_birth, point.birth_edge), (g_death, point.death_edge)):
                if g == 0.0 or edge is None:
                    continue
                u, v = edge
                d = emb_entries[u, v]
                if d == 0.0:
                    continue
                direction = (ys[u] - ys[v]) / d
                local[u] += g * direction
                local[v] -= g * direction
    return costs, local


def topo_loss_grad(
    embedding: Embedding,
    dist_target: DistanceMatrix,
    subsets: list[np.ndarray],
    cfg: DipoleConfig,
    executor: Executor | None = None,
    with_grad: bool = True,
) -> tuple[float, np.ndarray, tuple[float, ...]]:
    """Distributed-persistence loss averaged over the given subsets.

    Loss is (1/b) * sum over subsets of the per-degree W_p^p costs between the
    target-metric diagrams and the embedding diagrams of the subset. Gradients
    chain the matching subgradients through each diagram point's provenance
    edges into the embedded coordinates and accumulate in subset order, so the
    result does not depend on how the per-subset work is scheduled.
    """
    b = len(subsets)
    if b == 0:
        raise ParameterError("at least one subset is required")
    y = embedding.coords
    worker = lambda s: _subset_terms(y, dist_target.entries, s, cfg, with_grad)
    if executor is not None and b > 1:
        results = list(executor.map(worker, subsets))
    else:
        results = [worker(s) for s in subsets]

    grads = np.zeros_like(y)
    per_degree = np.zeros(cfg.max_degree + 1)
    for subset, (costs, local) in zip(subsets, results):
        per_degree += costs
        if with_grad and local is not None:
            np.add.at(grads, subset, local / b)
    per_degree /= b
    return float(per_degree.sum()), grads, tuple(float(c) for c in per_degree)


def dipole_loss(
    embedding: Embedding,
    dist_target: DistanceMatrix,
    pairs: NeighborGraph,
    subsets: list[np.ndarray],
    cfg: DipoleConfig,
    executor: Executor | None = None,
) -> LossBreakdown:
    """Evaluate the full loss on a fixed subset collection (no sampling)."""
    metric, _ = lmr_loss_grad(embedding, pairs)
    topo, _, per_degree = topo_loss_grad(
        embedding, dist_target, subsets, cfg, executor, with_grad=False
    )
    total = 0.5 * (1.0 - cfg.alpha) * topo + cfg.alpha * metric
    return LossBreakdown(total, topo, metric, per_degree)


def sample_subsets(
    rng: np.random.Generator, n: int, k: int, count: int
) -> list[np.ndarray]:
    """Draw `count` size-k index subsets uniformly without replacement."""
    return [np.sort(rng.choice(n, size=k, replace=False)) for _ in range(count)]


def sgd_step(
    state: OptimizerState,
    dist_target: DistanceMatrix,
    pairs: NeighborGraph,
    cfg: DipoleConfig,
    executor: Executor | None = None,
) -> OptimizerState:
    """One stochastic subgradient step: sample, descend, re-center.

    At alpha == 1 the topological machinery is skipped entirely and the trace
    records a zero topological component.
    """
    n = state.embedding.n
    metric, metric_grad = lmr_loss_grad(state.embedding, pairs)
    if cfg.alpha < 1.0:
        subsets = sample_subsets(state.rng, n, cfg.k, cfg.batch_size)
        topo, topo_grad, per_degree = topo_loss_grad(
            state.embedding, dist_target, subsets, cfg, executor
        )
    else:
        topo, topo_grad = 0.0, 0.0
        per_degree = tuple(0.0 for _ in range(cfg.max_degree + 1))

    grad = cfg.alpha * metric_grad + 0.5 * (1.0 - cfg.alpha) * topo_grad
    coords = state.embedding.coords - cfg.step_size(state.step) * grad
    coords = coords - coords.mean(axis=0, keepdims=True)
    state.embedding = Embedding(coords)
    state.step += 1
    total = 0.5 * (1.0 - cfg.alpha) * topo + cfg.alpha * metric
    state.trace.append(LossBreakdown(total, topo, metric, per_degree))
    return state


def run(
    initial: Embedding,
    dist_target: DistanceMatrix,
    cfg: DipoleConfig,
    threads: int = 1,
) -> OptimizerState:
    """Full descent: build the pair set, iterate cfg.steps steps, return the state.

    The initial embedding is mean-centered up front; with steps == 0 that is
    all that happens. When threads > 1 and batch_size > 1, per-subset diagram
    work within a step runs on a thread pool (accumulation order is fixed, so
    results are identical to the sequential run).
    """
    n = initial.n
    if dist_target.n != n:
        raise ParameterError("embedding and target metric sizes differ")
    if cfg.k > n:
        raise ParameterError(f"subset size k={cfg.k} exceeds point count {n}")
    if not 1 <= cfg.m2 <= n - 1:
        raise ParameterError(f"m2={cfg.m2} must satisfy 1 <= m2 <= {n - 1}")
    pairs = lmr_pairs(dist_target, cfg.m2)
    coords = initial.coords - initial.coords.mean(axis=0, keepdims=True)
    state = OptimizerState(
        embedding=Embedding(coords),
        step=0,
        rng=np.random.default_rng(cfg.seed),
        trace=[],
    )
    pool = None
    try:
        if threads > 1 and cfg.batch_size > 1:
            from concurrent.futures import ThreadPoolExecutor

            pool = ThreadPoolExecutor(max_workers=threads)
        for _ in range(cfg.steps):
            sgd_step(state, dist_target, pairs, cfg, pool)
    finally:
        if pool is not None:
            pool.shutdown()
    return state
