"""Exact induced census of the connected 3- and 4-node graphlets.

The fast path counts non-induced occurrences with closed-form identities
(degrees, per-edge triangle counts, codegrees, explicit K4 enumeration) and
then converts them to induced counts by inverting the containment matrix
among the six 4-node types.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass
from itertools import combinations
from math import comb

import numpy as np

from .graph import Graph

GRAPHLET_NAMES = ("g_p3", "g_tri", "g_p4", "g_claw", "g_c4", "g_paw", "g_diamond", "g_k4")
BRUTE_FORCE_LIMIT = 64


@dataclass(frozen=True)
class GraphletCounts:
    g_p3: int = 0
    g_tri: int = 0
    g_p4: int = 0
    g_claw: int = 0
    g_c4: int = 0
    g_paw: int = 0
    g_diamond: int = 0
    g_k4: int = 0

    def values(self) -> tuple[int, ...]:
        return astuple(self)

    def log_features(self) -> tuple[float, ...]:
        """log10(1 + count) per graphlet, the baseline classifier input."""
        return tuple(float(np.log10(1.0 + c)) for c in self.values())


def _pysum(a: np.ndarray) -> int:
    # exact Python-int reduction; avoids int64 overflow on dense graphs
    return sum(int(x) for x in a.tolist())


def count_graphlets(g: Graph) -> GraphletCounts:
    n = g.n
    if g.m == 0:
        return GraphletCounts()
    deg = g.degrees.astype(np.int64)
    a = g.to_sparse().astype(np.int64)
    a2 = (a @ a).tocsr()

    # per-edge common-neighbour counts, aligned with g.indices
    edge_tri = np.asarray(a2[np.repeat(np.arange(n), deg), g.indices]).ravel().astype(np.int64)
    src = np.repeat(np.arange(n), deg)
    upper = src < g.indices
    eu, ev, et = src[upper], g.indices[upper], edge_tri[upper]
    node_tri = np.bincount(src, weights=edge_tri, minlength=n).astype(np.int64) // 2
    triangles = _pysum(et) // 3

    wedges = _pysum(deg * (deg - 1) // 2)
    p3 = wedges - 3 * triangles

    # non-induced 4-node counts
    claw_n = sum(comb(int(d), 3) for d in deg.tolist())
    path_n = _pysum((deg[eu] - 1) * (deg[ev] - 1)) - 3 * triangles
    paw_n = _pysum(node_tri * (deg - 2).clip(min=0))
    diamond_n = _pysum(et * (et - 1) // 2)
    a2.setdiag(0)
    a2.eliminate_zeros()
    codeg = a2.data.astype(np.int64)
    # every unordered opposite pair is seen twice in a2, each C4 has two such pairs
    c4_n = _pysum(codeg * (codeg - 1) // 2) // 4
    k4 = _count_k4(g)

    diamond = diamond_n - 6 * k4
    c4 = c4_n - diamond - 3 * k4
    paw = paw_n - 4 * diamond - 12 * k4
    claw = claw_n - paw - 2 * diamond - 4 * k4
    p4 = path_n - 2 * paw - 4 * c4 - 6 * diamond - 12 * k4
    return GraphletCounts(p3, triangles, p4, claw, c4, paw, diamond, k4)


def _count_k4(g: Graph) -> int:
    """Enumerate K4s as ordered (u < v < w < x) extensions of triangles."""
    nbrs = [set(g.neighbors(u).tolist()) for u in range(g.n)]
    total = 0
    for u in range(g.n):
        higher = [v for v in g.neighbors(u).tolist() if v > u]
        if len(higher) < 3:
            continue
        hs = set(higher)
        for v in higher:
            common = hs & nbrs[v]
            for w in common:
                if w > v:
                    total += sum(1 for x in common & nbrs[w] if x > w)
    return total


def _classify4(edges: int, degs: tuple[int, ...]) -> str | None:
    if edges == 3:
        if 0 in degs:
            return None
        return "g_claw" if 3 in degs else "g_p4"
    if edges == 4:
        return "g_c4" if degs == (2, 2, 2, 2) else "g_paw"
    if edges == 5:
        return "g_diamond"
    if edges == 6:
        return "g_k4"
    return None


def brute_force_graphlets(g: Graph) -> GraphletCounts:
    """Reference census by enumerating every 3- and 4-node subset."""
    if g.n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_LIMIT}")
    adj = np.zeros((g.n, g.n), dtype=bool)
    e = g.edges()
    adj[e[:, 0], e[:, 1]] = adj[e[:, 1], e[:, 0]] = True
    counts = dict.fromkeys(GRAPHLET_NAMES, 0)
    for s in combinations(range(g.n), 3):
        k = int(adj[s[0], s[1]]) + int(adj[s[0], s[2]]) + int(adj[s[1], s[2]])
        if k == 2:
            counts["g_p3"] += 1
        elif k == 3:
            counts["g_tri"] += 1
    for s in combinations(range(g.n), 4):
        sub = adj[np.ix_(s, s)]
        degs = tuple(sorted(sub.sum(axis=1).tolist()))
        kind = _classify4(sum(degs) // 2, degs)
        if kind:
            counts[kind] += 1
    return GraphletCounts(**counts)
