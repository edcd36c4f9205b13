import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from netselect.graph import Graph

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def named(name: str) -> Graph:
    if name == "triangle":
        return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    if name == "P3":
        return Graph.from_edges(3, [(0, 1), (1, 2)])
    if name == "P4":
        return Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    if name == "C4":
        return Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    if name == "C5":
        return Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
    if name == "K4":
        return Graph.from_edges(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    if name == "S3":
        return Graph.from_edges(4, [(0, i) for i in range(1, 4)])
    if name == "S5":
        return Graph.from_edges(6, [(0, i) for i in range(1, 6)])
    if name == "paw":
        # triangle a-b-c with pendant d on a
        return Graph.from_edges(4, [(0, 1), (1, 2), (0, 2), (0, 3)])
    raise KeyError(name)


def gnp(n: int, p: float, seed) -> Graph:
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    mask = rng.random(len(iu[0])) < p
    return Graph.from_edges(n, np.column_stack([iu[0][mask], iu[1][mask]]))


@st.composite
def graphs(draw, min_n=1, max_n=30, min_m=0):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if len(pairs) < min_m:
        n = max_n
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=min_m, max_size=len(pairs), unique=True)
                  if pairs else st.just([]))
    return Graph.from_edges(n, chosen)


@pytest.fixture
def tmp_edges(tmp_path):
    def write(text: str, name="g.edges"):
        p = tmp_path / name
        p.write_text(text)
        return p
    return write
