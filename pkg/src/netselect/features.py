"""The ten-dimensional structural feature vector used for model selection.

Feature order is fixed: average clustering, transitivity, degree
assortativity, effective diameter, then six degree-distribution interval
probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from .graph import Graph

FEATURE_NAMES = (
    "avg_cc", "transitivity", "assortativity", "eff_diam",
    "degdist_p1", "degdist_p2", "degdist_p3", "degdist_p4", "degdist_p5", "degdist_p6",
)
DEGDIST_NAMES = FEATURE_NAMES[4:]

EXACT_LIMIT = 2000
N_SOURCES = 256
_BFS_CELLS = 1 << 23     # frontier block size in matrix cells


@dataclass(frozen=True)
class FeatureVector:
    avg_cc: float
    transitivity: float
    assortativity: float
    eff_diam: float
    degdist: tuple[float, ...]
    flags: frozenset[str] = field(default_factory=frozenset)

    def values(self) -> tuple[float, ...]:
        return (self.avg_cc, self.transitivity, self.assortativity, self.eff_diam, *self.degdist)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(FEATURE_NAMES, self.values()))


def node_triangles(g: Graph) -> np.ndarray:
    """Number of triangles through each node."""
    a = g.to_sparse()
    return np.asarray((a @ a).multiply(a).sum(axis=1)).ravel().astype(np.int64) // 2


def avg_clustering(g: Graph) -> float:
    if g.n < 1:
        raise ValueError("empty graph")
    deg = g.degrees
    tri = node_triangles(g)
    pairs = deg * (deg - 1) / 2
    local = np.zeros(g.n)
    ok = deg >= 2
    local[ok] = tri[ok] / pairs[ok]
    # fsum is exactly rounded, so the result does not depend on node order
    return math.fsum(local.tolist()) / g.n


def transitivity(g: Graph) -> float:
    """Returns 0.0 when the graph has no connected triplet."""
    deg = g.degrees
    triplets = int((deg * (deg - 1) // 2).sum())
    if triplets == 0:
        return 0.0
    # sum of per-node triangles is 3x the triangle count
    return float(node_triangles(g).sum() / triplets)


def assortativity(g: Graph) -> float | None:
    """Degree Pearson correlation across edge endpoints; None if undefined."""
    if g.m < 1:
        raise ValueError("assortativity needs at least one edge")
    deg = g.degrees.astype(np.int64)
    src = np.repeat(np.arange(g.n), g.degrees)
    x = deg[src]
    y = deg[g.indices]
    # both orientations are present, so x and y share their marginal and
    # r = (N Sxy - Sx^2) / (N Sxx - Sx^2); exact integer sums keep it
    # independent of node labels
    N = len(x)
    sx, sxx, sxy = int(x.sum()), int((x * x).sum()), int((x * y).sum())
    den = N * sxx - sx * sx
    if den == 0:
        return None
    return (N * sxy - sx * sx) / den


def hop_counts(g: Graph, sources) -> np.ndarray:
    """counts[d] = number of (source, target) pairs at hop distance d >= 1.

    Level-synchronous BFS from a block of sources at once; each level is one
    sparse-times-dense product over the frontier columns.
    """
    a = g.to_sparse().astype(np.float32)
    sources = np.asarray(sources, dtype=np.int64)
    counts = [0]
    block = max(1, _BFS_CELLS // max(g.n, 1))
    for start in range(0, len(sources), block):
        src = sources[start:start + block]
        visited = np.zeros((g.n, len(src)), dtype=bool)
        visited[src, np.arange(len(src))] = True
        frontier = visited.astype(np.float32)
        level = 1
        while True:
            reached = (a @ frontier) > 0
            reached &= ~visited
            k = int(reached.sum())
            if k == 0:
                break
            if level == len(counts):
                counts.append(0)
            counts[level] += k
            visited |= reached
            frontier = reached.astype(np.float32)
            level += 1
    return np.array(counts, dtype=np.int64)


def interpolated_quantile(counts: np.ndarray, q: float) -> float:
    """Linear interpolation of the hop-distance CDF at level ``q``."""
    total = counts.sum()
    if total == 0:
        raise ValueError("no connected pair of distinct nodes")
    cdf = np.cumsum(counts) / total
    d = int(np.argmax(cdf >= q - 1e-15))
    lo = cdf[d - 1] if d > 0 else 0.0
    return float(d - 1 + (q - lo) / (cdf[d] - lo))


def effective_diameter(g: Graph, q: float = 0.9, exact_limit: int = EXACT_LIMIT,
                       n_sources: int = N_SOURCES, seed=0) -> float:
    """Interpolated ``q``-quantile of hop distance over connected ordered pairs.

    All sources are used when ``n <= exact_limit``; otherwise ``n_sources``
    sources are drawn without replacement using ``seed``.
    """
    if g.m < 1:
        raise ValueError("no connected pair of distinct nodes")
    if g.n <= exact_limit:
        sources = np.arange(g.n)
    else:
        sources = np.sort(np.random.default_rng(seed).choice(g.n, size=n_sources, replace=False))
    return interpolated_quantile(hop_counts(g, sources), q)


def interval_points(deg, k: int = 6, p: float = 0.3) -> np.ndarray:
    deg = np.asarray(deg, dtype=np.float64)
    mu = math.fsum(deg.tolist()) / len(deg)
    sigma = math.sqrt(math.fsum(((deg - mu) ** 2).tolist()) / len(deg))
    inner = [mu - (k / 2 - i + 1) * p * sigma for i in range(2, k + 1)]
    return np.array([deg.min(), *inner, deg.max()])


def degree_percentiles(g_or_degrees, k: int = 6, p: float = 0.3) -> tuple[float, ...]:
    """Fraction of nodes whose degree falls in each of ``k`` intervals.

    Intervals are left-closed/right-open between consecutive interval points,
    with the last one closed, so the ``k`` values partition the nodes.  For a
    regular degree sequence all mass goes to interval ``k/2 + 1``.
    """
    if k < 4 or k % 2:
        raise ValueError("k must be an even number >= 4")
    if p <= 0:
        raise ValueError("p must be positive")
    deg = g_or_degrees.degrees if isinstance(g_or_degrees, Graph) else np.asarray(g_or_degrees)
    if len(deg) == 0:
        raise ValueError("empty degree sequence")
    out = np.zeros(k)
    if np.all(deg == deg[0]):
        out[k // 2] = 1.0
        return tuple(out.tolist())
    inner = interval_points(deg, k, p)[1:-1]
    slot = np.searchsorted(inner, deg, side="right")
    out += np.bincount(slot, minlength=k)
    return tuple((out / len(deg)).tolist())


def feature_vector(g: Graph, seed=0, exact_limit: int = EXACT_LIMIT,
                   n_sources: int = N_SOURCES, k: int = 6, p: float = 0.3) -> FeatureVector:
    if g.m < 1:
        raise ValueError("feature extraction needs at least one edge")
    flags = set()
    deg = g.degrees
    if deg.std() == 0:
        flags.add("sigma_zero")
    if int((deg * (deg - 1)).sum()) == 0:
        flags.add("no_triplets")
    r = assortativity(g)
    if r is None:
        flags.add("assortativity_undefined")
        r = 0.0
    if connected_components(g.to_sparse(), directed=False, return_labels=False) > 1:
        flags.add("disconnected")
    if g.n > exact_limit:
        flags.add("diameter_sampled")
    return FeatureVector(
        avg_cc=avg_clustering(g),
        transitivity=transitivity(g),
        assortativity=r,
        eff_diam=effective_diameter(g, 0.9, exact_limit, n_sources, seed),
        degdist=degree_percentiles(deg, k, p),
        flags=frozenset(flags),
    )
