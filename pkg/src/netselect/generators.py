"""Density-matched synthetic graphs from the seven candidate models.

Models: Erdos-Renyi (ER), preferential attachment (PA), small world (SW),
forest fire (FF), stochastic Kronecker (KG), random typing (RTG) and random
power law (RP).  Every generator takes an explicit seed and returns a simple
undirected :class:`~netselect.graph.Graph`.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import combinations, product

import numpy as np

from .graph import Graph, density

log = logging.getLogger(__name__)

MODELS = ("ER", "PA", "SW", "FF", "KG", "RTG", "RP")
CALIBRATED = ("FF", "KG", "RTG")
DENSITY_TOLERANCE = {"ER": 0.10, "PA": 0.10, "SW": 0.10, "RP": 0.10,
                     "FF": 0.25, "KG": 0.25, "RTG": 0.25}

FF_BACKWARD_RATIO = 0.32
KG_BASE = (0.9, 0.2)          # diagonal entries of the unscaled initiator
KG_LOOP_INFLATION = 1.02
RTG_LETTERS = 26
PILOT_BUDGET = 20
PILOT_TOLERANCE = 0.05

_MASK64 = (1 << 64) - 1


class GeneratorError(RuntimeError):
    pass


class CalibrationError(GeneratorError):
    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


class DatasetBuildError(GeneratorError):
    """A corpus build stopped early; ``completed`` holds the instances made so far."""

    def __init__(self, msg, completed, failed_id):
        super().__init__(msg)
        self.completed = completed
        self.failed_id = failed_id

    def report(self) -> str:
        by_model: dict[str, int] = {}
        for inst in self.completed:
            by_model[inst.model] = by_model.get(inst.model, 0) + 1
        done = ", ".join(f"{k}={v}" for k, v in by_model.items()) or "none"
        return f"failed at {self.failed_id}; completed before failure: {done}"


@dataclass(frozen=True)
class GeneratorParams:
    model: str
    n_target: int
    density_target: float
    model_specific: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if not 0.0 < self.density_target < 1.0:
            raise ValueError("density_target must lie in (0, 1)")
        if self.n_target < 8:
            raise ValueError("n_target must be >= 8")


@dataclass(frozen=True)
class DatasetSpec:
    """Corpus recipe. ``sizes`` is a list of ``(n, count)`` pairs per model;
    when empty, ``per_model_count`` graphs of size ``n`` are made."""

    models: tuple[str, ...] = MODELS
    per_model_count: int = 30
    n: int = 1024
    sizes: tuple[tuple[int, int], ...] = ()
    density_target: float = 0.004
    master_seed: int = 0

    def __post_init__(self):
        bad = set(self.models) - set(MODELS)
        if bad:
            raise ValueError(f"unknown models {sorted(bad)}")
        if self.per_model_count < 1:
            raise ValueError("per_model_count must be >= 1")
        if any(n < 8 for n, _ in self.size_plan()):
            raise ValueError("graph sizes must be >= 8")

    def size_plan(self) -> list[tuple[int, int]]:
        if self.sizes:
            return [(int(n), int(c)) for n, c in self.sizes]
        return [(int(self.n), int(self.per_model_count))]


@dataclass
class Instance:
    graph_id: str
    model: str
    graph: Graph
    params: GeneratorParams
    seed: int


# -- seeding -----------------------------------------------------------------

def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def child_seed(master_seed: int, model_ordinal: int, index: int) -> int:
    """64-bit child seed: splitmix64(splitmix64(splitmix64(master) ^ ordinal) ^ index)."""
    x = splitmix64(master_seed & _MASK64)
    x = splitmix64(x ^ (model_ordinal & _MASK64))
    return splitmix64(x ^ (index & _MASK64))


# -- helpers -----------------------------------------------------------------

def _sample_distinct_pairs(rng, n: int, m: int) -> np.ndarray:
    """m distinct unordered non-loop pairs, uniform over all m-subsets."""
    total = n * (n - 1) // 2
    if m > total:
        raise GeneratorError("more edges requested than node pairs")
    if m > total // 2:
        iu = np.column_stack(np.triu_indices(n, 1))
        return iu[np.sort(rng.choice(total, size=m, replace=False))]
    keys = np.empty(0, dtype=np.int64)
    while len(keys) < m:
        k = int((m - len(keys)) * 1.2) + 16
        u = rng.integers(0, n, size=k)
        v = rng.integers(0, n, size=k)
        ok = u != v
        new = np.minimum(u, v)[ok] * n + np.maximum(u, v)[ok]
        allk = np.concatenate([keys, new])
        _, first = np.unique(allk, return_index=True)
        keys = allk[np.sort(first)][:m]
    return np.column_stack([keys // n, keys % n])


def pa_edges_per_node(n: int, density_target: float) -> int:
    return max(1, int(round(density_target * (n - 1) / 2)))


def pa_density(n: int, m0: int) -> float:
    edges = m0 * (m0 + 1) // 2 + m0 * (n - m0 - 1)
    return 2.0 * edges / (n * (n - 1))


def snap_density_pa(n: int, density_target: float) -> float:
    """Nearest density a preferential-attachment graph on n nodes can reach."""
    return pa_density(n, pa_edges_per_node(n, density_target))


def sw_lattice_degree(n: int, density_target: float) -> int:
    return 2 * int(round(density_target * (n - 1) / 2))


# -- the seven generators ----------------------------------------------------

def gen_er(n: int, density_target: float, seed) -> Graph:
    """G(n, p) with p equal to the target density."""
    if not 0.0 < density_target < 1.0:
        raise ValueError("density_target must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    m = int(rng.binomial(n * (n - 1) // 2, density_target))
    return Graph.from_edges(n, _sample_distinct_pairs(rng, n, m))


def gen_pa(n: int, density_target: float, seed) -> Graph:
    """Barabasi-Albert growth from a seed clique."""
    m0 = pa_edges_per_node(n, density_target)
    if m0 > n / 4:
        raise GeneratorError(f"density {density_target} too high for growth model at n={n}")
    rng = np.random.default_rng(seed)
    edges = list(combinations(range(m0 + 1), 2))
    # each endpoint appears once per incident edge: uniform pick == degree-proportional
    ends = [x for e in edges for x in e]
    for t in range(m0 + 1, n):
        chosen: set[int] = set()
        while len(chosen) < m0:
            draws = rng.integers(0, len(ends), size=m0 - len(chosen))
            for i in draws.tolist():
                if len(chosen) < m0:
                    chosen.add(ends[i])
        for s in sorted(chosen):
            edges.append((s, t))
            ends.extend((s, t))
    return Graph.from_edges(n, edges)


def gen_sw(n: int, density_target: float, beta: float, seed) -> Graph:
    """Watts-Strogatz ring lattice with per-edge endpoint rewiring."""
    k = sw_lattice_degree(n, density_target)
    if k < 2:
        raise GeneratorError(f"density {density_target} too low for a ring lattice at n={n}")
    if k >= n - 1:
        raise GeneratorError("lattice degree must be below n - 1")
    rng = np.random.default_rng(seed)
    adj = [set() for _ in range(n)]
    for u in range(n):
        for j in range(1, k // 2 + 1):
            v = (u + j) % n
            adj[u].add(v)
            adj[v].add(u)
    for j in range(1, k // 2 + 1):
        coins = rng.random(n)
        for u in range(n):
            if coins[u] >= beta:
                continue
            v = (u + j) % n
            if v not in adj[u] or len(adj[u]) >= n - 1:
                continue
            while True:
                w = int(rng.integers(0, n))
                if w != u and w not in adj[u]:
                    break
            adj[u].discard(v)
            adj[v].discard(u)
            adj[u].add(w)
            adj[w].add(u)
    edges = [(u, v) for u in range(n) for v in adj[u] if u < v]
    return Graph.from_edges(n, edges)


def gen_ff(n: int, density_target: float, seed, p_forward: float | None = None,
           backward_ratio: float = FF_BACKWARD_RATIO) -> Graph:
    """Forest fire growth, generated directed and then symmetrized.

    Without ``p_forward`` the forward burn probability is calibrated first.
    """
    if p_forward is None:
        p_forward = calibrate_density("FF", n, density_target, seed).model_specific["p_forward"]
    return _forest_fire(n, p_forward, backward_ratio * p_forward, seed)


def _forest_fire(n: int, p_f: float, p_b: float, seed) -> Graph:
    rng = np.random.default_rng(seed)
    out_nb: list[list[int]] = [[] for _ in range(n)]
    in_nb: list[list[int]] = [[] for _ in range(n)]
    edges = []
    for v in range(1, n):
        amb = int(rng.integers(0, v))
        burned = {v, amb}
        queue = deque([amb])
        links = [amb]
        while queue:
            x = queue.popleft()
            n_out = int(rng.geometric(1.0 - p_f)) - 1 if p_f > 0 else 0
            n_in = int(rng.geometric(1.0 - p_b)) - 1 if p_b > 0 else 0
            for pool, want in ((out_nb[x], n_out), (in_nb[x], n_in)):
                if want <= 0:
                    continue
                cand = [y for y in pool if y not in burned]
                if len(cand) > want:
                    cand = [cand[i] for i in sorted(rng.choice(len(cand), size=want, replace=False).tolist())]
                for y in cand:
                    burned.add(y)
                    links.append(y)
                    queue.append(y)
        for y in links:
            out_nb[v].append(y)
            in_nb[y].append(v)
            edges.append((v, y))
    return Graph.from_edges(n, edges)


def kg_initiator(k_iters: int, density_target: float, b: float = 0.5,
                 edge_scale: float = KG_LOOP_INFLATION) -> tuple[float, float, float]:
    """Scale the base initiator [[0.9, b], [b, 0.2]] to the target edge count.

    The expected number of directed edges, (a + 2b + c)^k, is set to
    ``edge_scale * density_target * n^2``.  If the diagonal entry would exceed
    one it is pinned at one and the remaining mass is spread over b and c in
    their base proportion.
    """
    n = 2 ** k_iters
    total = (edge_scale * density_target * n * n) ** (1.0 / k_iters)
    a0, c0 = KG_BASE
    s = total / (a0 + 2 * b + c0)
    a, bb, c = a0 * s, b * s, c0 * s
    if a > 1.0:
        t = (total - 1.0) / (2 * b + c0)
        a, bb, c = 1.0, b * t, c0 * t
    if max(a, bb, c) > 1.0 or min(a, bb, c) < 0.0:
        raise GeneratorError(f"density {density_target} unreachable with a 2x2 initiator at n={n}")
    return a, bb, c


def _kg_cells(rng, k: int, n00: int, noff: int, n11: int, count: int) -> np.ndarray:
    """``count`` distinct (u, v) cells whose bit-pair profile is (n00, noff, n11)."""
    size = math.comb(k, n00) * math.comb(k - n00, noff) * 2 ** noff
    weights = 1 << np.arange(k, dtype=np.int64)
    if count * 2 > size or size <= 64:
        cells = []
        for pos00 in combinations(range(k), n00):
            rest = [i for i in range(k) if i not in pos00]
            for posoff in combinations(rest, noff):
                pos11 = [i for i in rest if i not in posoff]
                base_u = sum(1 << i for i in pos11)
                for bits in product((0, 1), repeat=noff):
                    u = base_u + sum(1 << p for p, bt in zip(posoff, bits) if bt)
                    v = base_u + sum(1 << p for p, bt in zip(posoff, bits) if not bt)
                    cells.append((u, v))
        cells = np.array(cells, dtype=np.int64)
        return cells[np.sort(rng.choice(len(cells), size=count, replace=False))]
    pattern = np.array([0] * n00 + [1] * noff + [2] * n11, dtype=np.int8)
    n = 1 << k
    keys = np.empty(0, dtype=np.int64)
    while len(keys) < count:
        draw = count - len(keys) + 8
        types = rng.permuted(np.tile(pattern, (draw, 1)), axis=1)
        flip = rng.integers(0, 2, size=(draw, k), dtype=np.int8)
        ubits = (types == 2) | ((types == 1) & (flip == 1))
        vbits = (types == 2) | ((types == 1) & (flip == 0))
        new = (ubits @ weights) * n + (vbits @ weights)
        allk = np.concatenate([keys, new])
        _, first = np.unique(allk, return_index=True)
        keys = allk[np.sort(first)][:count]
    return np.column_stack([keys // n, keys % n])


def gen_kg(k_iters: int, density_target: float, seed, b: float = 0.5,
           initiator: tuple[float, float, float] | None = None) -> Graph:
    """Stochastic Kronecker graph on 2^k_iters nodes.

    Each directed cell (u, v) is an independent Bernoulli draw with
    probability prod_i theta[u_i][v_i].  Cells sharing a bit-pair profile
    share that probability, so each profile is sampled as a binomial count
    followed by uniform distinct cells.  The result is symmetrized and loops
    are dropped.
    """
    if initiator is None:
        initiator = calibrate_density("KG", 2 ** k_iters, density_target, seed,
                                      b=b).model_specific["initiator"]
    a, bb, c = initiator
    rng = np.random.default_rng(seed)
    parts = []
    for n00 in range(k_iters + 1):
        for n11 in range(k_iters + 1 - n00):
            noff = k_iters - n00 - n11
            prob = a ** n00 * bb ** noff * c ** n11
            if prob <= 0.0:
                continue
            size = math.comb(k_iters, n00) * math.comb(k_iters - n00, noff) * 2 ** noff
            hits = int(rng.binomial(size, min(prob, 1.0)))
            if hits:
                parts.append(_kg_cells(rng, k_iters, n00, noff, n11, hits))
    n = 2 ** k_iters
    edges = np.vstack(parts) if parts else np.empty((0, 2), dtype=np.int64)
    return Graph.from_edges(n, edges)


def _rtg_stream(n_target: int, q: float, beta: float, letters: int, rng):
    """Type words until ``n_target`` distinct ones have appeared.

    Returns the token stream as word ids in first-appearance order.
    """
    probs = np.concatenate([[q], (1.0 - q) * beta ** np.arange(letters)
                            / (beta ** np.arange(letters)).sum()])
    ids: dict[bytes, int] = {}
    tokens: list[int] = []
    tail = b""
    chunk = max(4096, int(8 * n_target / q))
    while len(ids) < n_target:
        keys = rng.choice(letters + 1, size=chunk, p=probs).astype(np.uint8)
        words = (tail + keys.tobytes()).split(b"\x00")
        tail = words.pop()
        for w in words:
            if not w:
                continue
            wid = ids.get(w)
            if wid is None:
                if len(ids) == n_target:
                    return tokens
                wid = ids[w] = len(ids)
            tokens.append(wid)
        if len(tokens) > 4000 * n_target:
            raise GeneratorError("random typing vocabulary grows too slowly")
    return tokens


def gen_rtg(n_approx: int, density_target: float, seed, q: float = 0.35,
            beta: float | None = None, letters: int = RTG_LETTERS) -> Graph:
    """Random typing graph: consecutive words of a typed stream are linked.

    Each keystroke is the space bar with probability ``q``; otherwise letter
    ``i`` is typed with probability proportional to ``beta**i``.  Typing stops
    just before the ``n_approx + 1``-th distinct word, so the vocabulary (node
    count) is ``n_approx``.  Lower ``beta`` means a more skewed keyboard,
    more repeated words and a denser graph; without ``beta`` it is calibrated.
    """
    if beta is None:
        beta = calibrate_density("RTG", n_approx, density_target, seed,
                                 q=q).model_specific["beta"]
    rng = np.random.default_rng(seed)
    tokens = np.array(_rtg_stream(n_approx, q, beta, letters, rng), dtype=np.int64)
    n = int(tokens.max()) + 1 if len(tokens) else 0
    return Graph.from_edges(n, np.column_stack([tokens[:-1], tokens[1:]]))


def power_law_degrees(n: int, mean_degree: float, gamma: float, rng,
                      max_degree: int | None = None) -> np.ndarray:
    """Discrete power-law sequence rescaled to the requested mean, even sum.

    Degrees are clipped to ``[1, max_degree]``; the default cap ``n // 4``
    keeps the sequence realizable as a simple graph for gamma near 2.
    """
    cap = max(2, n // 4) if max_degree is None else max_degree
    x = (1.0 - rng.random(n)) ** (-1.0 / (gamma - 1.0))

    def seq(s):
        return np.clip(np.rint(s * x), 1, cap).astype(np.int64)

    lo, hi = 1e-6, float(mean_degree) * 2 + 1
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if seq(mid).mean() < mean_degree:
            lo = mid
        else:
            hi = mid
    deg = seq(hi if abs(seq(hi).mean() - mean_degree) <= abs(seq(lo).mean() - mean_degree) else lo)
    if deg.sum() % 2:
        i = int(np.argmax(deg))
        deg[i] += -1 if deg[i] > 1 else 1
    return deg


def configuration_edges(deg: np.ndarray, rng, rounds: int = 50, switch_budget: int = 1000):
    """Stub matching rejecting loops and multi-edges.

    Invalid pairs are reshuffled for ``rounds`` rounds, then repaired by
    switching with random accepted edges.  Returns (edges, dropped stubs).
    """
    n = len(deg)
    stubs = np.repeat(np.arange(n), deg)
    rng.shuffle(stubs)
    edges: list[tuple[int, int]] = []
    present: set[int] = set()

    def key(u, v):
        return u * n + v if u < v else v * n + u

    pending = stubs
    for _ in range(rounds):
        if len(pending) < 2:
            break
        rng.shuffle(pending)
        left = []
        for u, v in pending.reshape(-1, 2).tolist():
            kk = key(u, v)
            if u != v and kk not in present:
                present.add(kk)
                edges.append((min(u, v), max(u, v)))
            else:
                left.extend((u, v))
        pending = np.array(left, dtype=np.int64)

    dropped = 0
    leftover = pending.reshape(-1, 2).tolist()
    for u, v in leftover:
        placed = False
        for _ in range(switch_budget):
            if not edges:
                break
            i = int(rng.integers(0, len(edges)))
            c, d = edges[i]
            if rng.random() < 0.5:
                c, d = d, c
            # a loop u-u becomes u-c, u-d; a multi-edge u-v becomes u-c, v-d
            if u in (c, d) or v in (c, d):
                continue
            k1, k2 = key(u, c), key(v, d)
            if k1 in present or k2 in present or k1 == k2:
                continue
            present.discard(key(c, d))
            present.add(k1)
            present.add(k2)
            edges[i] = (min(u, c), max(u, c))
            edges.append((min(v, d), max(v, d)))
            placed = True
            break
        if not placed:
            dropped += 2
    return edges, dropped


def gen_rp(n: int, density_target: float, gamma: float, seed) -> Graph:
    """Random power-law graph: configuration model on a power-law sequence."""
    if not 2.1 <= gamma <= 3.0:
        raise ValueError("gamma must lie in [2.1, 3.0]")
    rng = np.random.default_rng(seed)
    deg = power_law_degrees(n, density_target * (n - 1), gamma, rng)
    edges, dropped = configuration_edges(deg, rng)
    if dropped > 0.01 * deg.sum():
        raise GeneratorError(f"degree sequence not realizable: dropped {dropped} of {deg.sum()} stubs")
    if dropped:
        log.debug("gen_rp: dropped %d residual stubs", dropped)
    return Graph.from_edges(n, edges)


# -- calibration -------------------------------------------------------------

def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def calibrate_density(model: str, n: int, density_target: float, seed, **fixed) -> GeneratorParams:
    """Tune the dominant density knob of a model for (n, density_target).

    ER/PA/SW/RP have closed forms.  FF (forward burn probability), KG (edge
    scale of the initiator) and RTG (keyboard skew, or the space probability
    when even a flat keyboard is too dense) are bisected on pilot generations
    at full size, at most ``PILOT_BUDGET`` of them; the closest pilot is kept.
    Raises :class:`CalibrationError` if it is still outside the model's
    tolerance.
    """
    if model == "ER":
        return GeneratorParams(model, n, density_target, {"p": density_target})
    if model == "PA":
        return GeneratorParams(model, n, density_target, {"m_per_node": pa_edges_per_node(n, density_target)})
    if model == "SW":
        return GeneratorParams(model, n, density_target,
                               {"k": sw_lattice_degree(n, density_target), **fixed})
    if model == "RP":
        return GeneratorParams(model, n, density_target, dict(fixed))

    rng = np.random.default_rng(seed)
    tol = DENSITY_TOLERANCE[model]
    if model == "FF":
        def pilot(x, s):
            return _forest_fire(n, x, FF_BACKWARD_RATIO * x, s)

        # achieved density increases with p_forward
        x, err = _bisect(pilot, density_target, rng, 0.0, 0.7, True, None, PILOT_BUDGET, model)
        ms = {"p_forward": x, "backward_ratio": FF_BACKWARD_RATIO}
    elif model == "KG":
        if not _is_power_of_two(n):
            raise GeneratorError(f"KG needs a power-of-two node count, got {n}")
        k_iters = n.bit_length() - 1
        b = fixed.get("b", 0.5)

        def init(x):
            return kg_initiator(k_iters, density_target, b, math.exp(x))

        def pilot(x, s):
            return gen_kg(k_iters, density_target, s, initiator=init(x))

        # search over log edge-scale; achieved density increases with it
        x, err = _bisect(pilot, density_target, rng, math.log(0.5), math.log(8.0), True,
                         math.log(KG_LOOP_INFLATION), PILOT_BUDGET, model)
        ms = {"b": b, "edge_scale": math.exp(x), "initiator": init(x)}
    elif model == "RTG":
        q = fixed.get("q", 0.35)
        letters = fixed.get("letters", RTG_LETTERS)

        def pilot_beta(x, s):
            return gen_rtg(n, density_target, s, q=q, beta=x, letters=letters)

        # a flat keyboard is the sparsest setting for this q; if even that is
        # too dense, lower the space probability instead (longer words)
        flat_err = density(pilot_beta(1.0, int(rng.integers(2**63)))) / density_target - 1.0
        if flat_err > PILOT_TOLERANCE:
            def pilot_q(x, s):
                return gen_rtg(n, density_target, s, q=x, beta=1.0, letters=letters)

            x, err = _bisect(pilot_q, density_target, rng, 0.02, q, True, None,
                             PILOT_BUDGET - 1, model)
            if abs(flat_err) < abs(err):
                x, err = q, flat_err
            ms = {"q": x, "beta": 1.0, "letters": letters}
        else:
            # a flatter keyboard (higher beta) gives a sparser graph
            x, err = _bisect(pilot_beta, density_target, rng, 0.02, 1.0, False, None,
                             PILOT_BUDGET - 1, model)
            if abs(flat_err) < abs(err):
                x, err = 1.0, flat_err
            ms = {"q": q, "beta": x, "letters": letters}
    else:
        raise ValueError(f"unknown model {model!r}")

    params = GeneratorParams(model, n, density_target, {**ms, "pilot_error": err})
    if abs(err) > tol:
        raise CalibrationError(
            f"{model} calibration at n={n}, density={density_target}: best relative error {err:+.3f}",
            best=params)
    return params


def _bisect(pilot, density_target, rng, lo, hi, increasing, start, budget, model):
    """Bisect a scalar knob on pilot graphs; returns the closest (x, rel_error)."""
    best = None
    x = 0.5 * (lo + hi) if start is None else start
    for _ in range(budget):
        try:
            achieved = density(pilot(x, int(rng.integers(2**63))))
        except GeneratorError:
            # unreachable region: treat as too dense for KG, too sparse otherwise
            achieved = math.inf if model == "KG" else 0.0
        err = achieved / density_target - 1.0
        if best is None or abs(err) < abs(best[1]):
            best = (x, err)
        if abs(err) <= PILOT_TOLERANCE:
            break
        if (err < 0) == increasing:
            lo = x
        else:
            hi = x
        x = 0.5 * (lo + hi)
    return best


# -- corpus ------------------------------------------------------------------

def sample_secondary(model: str, rng) -> dict:
    """Per-instance parameters that give intra-class diversity."""
    if model == "SW":
        return {"beta": float(math.exp(rng.uniform(math.log(0.01), math.log(0.3))))}
    if model == "KG":
        return {"b": float(rng.uniform(0.4, 0.6))}
    if model == "RTG":
        return {"q": float(rng.uniform(0.25, 0.45))}
    if model == "RP":
        return {"gamma": float(rng.uniform(2.1, 3.0))}
    return {}


def generate(params: GeneratorParams, seed) -> Graph:
    n, d, ms = params.n_target, params.density_target, params.model_specific
    if params.model == "ER":
        return gen_er(n, d, seed)
    if params.model == "PA":
        return gen_pa(n, d, seed)
    if params.model == "SW":
        return gen_sw(n, d, ms["beta"], seed)
    if params.model == "FF":
        return gen_ff(n, d, seed, p_forward=ms["p_forward"], backward_ratio=ms["backward_ratio"])
    if params.model == "KG":
        return gen_kg(n.bit_length() - 1, d, seed, initiator=tuple(ms["initiator"]))
    if params.model == "RTG":
        return gen_rtg(n, d, seed, q=ms["q"], beta=ms["beta"], letters=ms["letters"])
    if params.model == "RP":
        return gen_rp(n, d, ms["gamma"], seed)
    raise ValueError(params.model)


def make_instance(model: str, n: int, density_target: float, seed: int,
                  graph_id: str, shared: dict | None = None) -> Instance:
    """Sample secondary parameters, calibrate if needed, and generate."""
    rng = np.random.default_rng(seed)
    secondary = sample_secondary(model, rng)
    if shared:
        params = GeneratorParams(model, n, density_target, {**shared, **secondary})
    else:
        params = calibrate_density(model, n, density_target, int(rng.integers(2**63)), **secondary)
        params = replace(params, model_specific={**secondary, **params.model_specific})
    g = generate(params, int(rng.integers(2**63)))
    return Instance(graph_id, model, g, params, seed)


def _make_instance_task(args):
    return make_instance(*args)


def build_dataset(spec: DatasetSpec, workers: int = 1) -> list[Instance]:
    """Generate the labeled corpus described by ``spec``.

    Instance ``i`` of model ``M`` uses ``child_seed(master_seed, ordinal(M), i)``.
    Forest fire is calibrated once per size, since it has no per-instance
    secondary parameters; the result does not depend on ``workers``.
    """
    tasks = []
    for model in spec.models:
        ordinal = MODELS.index(model)
        index = 0
        for n, count in spec.size_plan():
            shared = None
            if model == "FF":
                cal_seed = child_seed(spec.master_seed, ordinal, (1 << 40) + n)
                shared = calibrate_density("FF", n, spec.density_target, cal_seed).model_specific
            for _ in range(count):
                seed = child_seed(spec.master_seed, ordinal, index)
                tasks.append((model, n, spec.density_target, seed, f"{model}_{n}_{index:04d}", shared))
                index += 1
    done: list[Instance] = []
    try:
        if workers > 1:
            with ProcessPoolExecutor(workers) as pool:
                for inst in pool.map(_make_instance_task, tasks, chunksize=4):
                    done.append(inst)
        else:
            for t in tasks:
                done.append(_make_instance_task(t))
    except (GeneratorError, ValueError) as exc:
        failed = tasks[len(done)][4]
        raise DatasetBuildError(f"{failed}: {exc}", done, failed) from exc
    return done
