"""Simple undirected graphs in CSR form, edge-list I/O and perturbations."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)

REWIRE_ATTEMPTS = 100


class EdgeListError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph on nodes ``0..n-1``.

    Neighbors of ``u`` are ``indices[indptr[u]:indptr[u + 1]]``, strictly
    increasing. Build instances with :meth:`from_edges`.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray

    @classmethod
    def from_edges(cls, n: int, edges) -> Graph:
        """Canonicalize an edge collection: drops loops, merges duplicates."""
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range")
        e = e[e[:, 0] != e[:, 1]]
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        keys = np.unique(lo * n + hi)
        lo, hi = keys // n, keys % n
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        indices = dst.astype(np.int64)
        indptr.setflags(write=False)
        indices.setflags(write=False)
        return cls(int(n), indptr, indices)

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def edges(self) -> np.ndarray:
        """(m, 2) array of edges with u < v in lexicographic order."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = src < self.indices
        return np.column_stack([src[keep], self.indices[keep]])

    def to_sparse(self) -> sp.csr_matrix:
        data = np.ones(len(self.indices), dtype=np.float64)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __hash__(self):
        return hash((self.n, self.indices.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def __reduce__(self):
        # read-only arrays do not survive every pickle path; ship plain copies
        return (_rebuild, (self.n, np.array(self.indptr), np.array(self.indices)))


def _rebuild(n, indptr, indices) -> Graph:
    indptr.setflags(write=False)
    indices.setflags(write=False)
    return Graph(n, indptr, indices)


@dataclass(frozen=True)
class DegreeStats:
    mu: float
    sigma: float
    dmin: int
    dmax: int
    histogram: dict[int, int] = field(default_factory=dict)


@dataclass
class LoadReport:
    lines: int = 0
    loops_dropped: int = 0
    duplicates_dropped: int = 0
    extra_columns: int = 0
    empty: bool = False


def read_edge_list(path, n_nodes: int | None = None) -> tuple[Graph, LoadReport]:
    """Parse an edge-list file and return the graph with coercion statistics.

    Node ids are compacted to ``0..n-1`` in first-appearance order unless the
    node count is declared, either by ``n_nodes`` or by a ``# nodes <n>``
    header line; declared ids are then used verbatim.
    """
    report = LoadReport()
    pairs: list[tuple[int, int]] = []
    declared = n_nodes
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise EdgeListError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            tok = line[1:].split()
            if declared is None and len(tok) == 2 and tok[0] == "nodes":
                declared = int(tok[1])
            continue
        tok = line.split()
        if len(tok) < 2:
            raise EdgeListError(f"{path}:{lineno}: expected 'u v'")
        if len(tok) > 2:
            report.extra_columns += 1
        try:
            u, v = int(tok[0]), int(tok[1])
        except ValueError:
            raise EdgeListError(f"{path}:{lineno}: non-integer token") from None
        pairs.append((u, v))
    report.lines = len(pairs)

    if declared is None:
        ids: dict[int, int] = {}
        for u, v in pairs:
            ids.setdefault(u, len(ids))
            ids.setdefault(v, len(ids))
        n = len(ids)
        raw = np.array([(ids[u], ids[v]) for u, v in pairs], dtype=np.int64).reshape(-1, 2)
    else:
        n = int(declared)
        raw = np.array(pairs, dtype=np.int64).reshape(-1, 2)
        if raw.size and (raw.min() < 0 or raw.max() >= n):
            raise EdgeListError(f"{path}: node id outside declared range 0..{n - 1}")

    loops = raw[:, 0] == raw[:, 1]
    report.loops_dropped = int(loops.sum())
    g = Graph.from_edges(n, raw[~loops])
    report.duplicates_dropped = int((~loops).sum()) - g.m
    report.empty = g.m == 0
    return g, report


def load_edge_list(path, n_nodes: int | None = None) -> Graph:
    g, report = read_edge_list(path, n_nodes)
    if report.loops_dropped or report.duplicates_dropped:
        log.info("%s: dropped %d self-loops, %d duplicate edges",
                 path, report.loops_dropped, report.duplicates_dropped)
    if report.empty:
        log.warning("%s: graph has no edges", path)
    return g


def save_edge_list(g: Graph, path) -> None:
    lines = [f"# nodes {g.n}", f"# edges {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges().tolist())
    Path(path).write_text("\n".join(lines) + "\n")


def density(g: Graph) -> float:
    if g.n < 2:
        raise ValueError("density needs at least 2 nodes")
    return 2.0 * g.m / (g.n * (g.n - 1))


def degree_stats(g: Graph) -> DegreeStats:
    if g.n < 1:
        raise ValueError("empty graph")
    deg = g.degrees
    values, counts = np.unique(deg, return_counts=True)
    return DegreeStats(
        mu=float(deg.mean()),
        sigma=float(deg.std()),
        dmin=int(deg.min()),
        dmax=int(deg.max()),
        histogram=dict(zip(values.tolist(), counts.tolist())),
    )


def rewire_random(g: Graph, fraction: float, seed) -> Graph:
    """Replace ``round(fraction * m)`` random edges by random non-edges.

    Replacements never coincide with an original edge, so exactly that many
    edges differ unless placement fails for a near-complete graph, in which
    case the original edge is kept.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    edges = g.edges()
    k = int(round(fraction * g.m))
    if k == 0:
        return g
    n = g.n
    chosen = rng.choice(g.m, size=k, replace=False)
    occupied = set((edges[:, 0] * n + edges[:, 1]).tolist())
    keep = np.ones(g.m, dtype=bool)
    keep[chosen] = False
    new_edges = []
    failed = 0
    for idx in chosen.tolist():
        for _ in range(REWIRE_ATTEMPTS):
            u, v = rng.integers(0, n, size=2).tolist()
            if u == v:
                continue
            key = min(u, v) * n + max(u, v)
            if key not in occupied:
                occupied.add(key)
                new_edges.append((u, v))
                break
        else:
            failed += 1
            keep[idx] = True
    if failed:
        log.warning("rewire_random: kept %d edges after %d failed attempts each",
                    failed, REWIRE_ATTEMPTS)
    all_edges = np.vstack([edges[keep], np.array(new_edges, dtype=np.int64).reshape(-1, 2)])
    return Graph.from_edges(n, all_edges)


def permute_nodes(g: Graph, seed) -> Graph:
    perm = np.random.default_rng(seed).permutation(g.n)
    return Graph.from_edges(g.n, perm[g.edges()])
