"""Corpus directories, feature extraction over corpora and the feature CSV."""

from __future__ import annotations

import csv
import json
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classifier import LabeledDataset
from .features import FEATURE_NAMES, feature_vector
from .generators import Instance
from .graph import Graph, density, load_edge_list, save_edge_list
from .graphlets import GRAPHLET_NAMES, count_graphlets

CSV_BASE = ("graph_id", "model", "n", "m", "density")
MANIFEST_FIELDS = ("graph_id", "model", "n", "m", "density", "seed", "params")


def fmt(x) -> str:
    """12 significant digits, the fixed decimal form of every emitted float."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def graph_seed(graph_id: str, master_seed: int = 0) -> int:
    """Deterministic per-graph seed for the sampled effective-diameter path."""
    return (zlib.crc32(graph_id.encode()) << 32) ^ (master_seed & 0xFFFFFFFF)


# -- corpus directory -------------------------------------------------------

def write_corpus(instances: list[Instance], directory) -> list[Path]:
    out = Path(directory)
    (out / "graphs").mkdir(parents=True, exist_ok=True)
    files = []
    for inst in instances:
        path = out / "graphs" / f"{inst.graph_id}.edges"
        save_edge_list(inst.graph, path)
        files.append(path)
    manifest = out / "corpus.csv"
    with manifest.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MANIFEST_FIELDS)
        for inst in sorted(instances, key=lambda i: i.graph_id):
            params = {k: v for k, v in inst.params.model_specific.items()}
            w.writerow([inst.graph_id, inst.model, inst.graph.n, inst.graph.m,
                        fmt(density(inst.graph)), inst.seed, json.dumps(params, sort_keys=True)])
    files.append(manifest)
    return files


@dataclass
class CorpusEntry:
    graph_id: str
    model: str
    path: Path


def read_corpus(directory) -> list[CorpusEntry]:
    root = Path(directory)
    with (root / "corpus.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    return [CorpusEntry(r["graph_id"], r["model"], root / "graphs" / f"{r['graph_id']}.edges")
            for r in rows]


# -- extraction -------------------------------------------------------------

@dataclass
class FeatureRow:
    graph_id: str
    model: str
    n: int
    m: int
    density: float
    features: tuple[float, ...]
    graphlets: tuple[int, ...] | None = None
    flags: frozenset[str] = frozenset()


def extract_row(graph_id: str, model: str, g: Graph, graphlets: bool = False,
                master_seed: int = 0) -> FeatureRow:
    fv = feature_vector(g, seed=graph_seed(graph_id, master_seed))
    gc = count_graphlets(g).values() if graphlets else None
    return FeatureRow(graph_id, model, g.n, g.m, density(g), fv.values(), gc, fv.flags)


def _extract_task(args):
    graph_id, model, g, graphlets, master_seed = args
    if isinstance(g, (str, Path)):
        g = load_edge_list(g)
    return extract_row(graph_id, model, g, graphlets, master_seed)


def extract_rows(items, graphlets: bool = False, master_seed: int = 0,
                 workers: int = 1) -> list[FeatureRow]:
    """Extract feature rows for ``(graph_id, model, graph_or_path)`` items.

    Output is sorted by graph id regardless of ``workers``.
    """
    tasks = [(gid, model, g, graphlets, master_seed) for gid, model, g in items]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_extract_task, tasks, chunksize=4))
    else:
        rows = [_extract_task(t) for t in tasks]
    return sorted(rows, key=lambda r: r.graph_id)


def write_feature_csv(rows: list[FeatureRow], path) -> None:
    with_graphlets = any(r.graphlets is not None for r in rows)
    header = list(CSV_BASE) + list(FEATURE_NAMES) + (list(GRAPHLET_NAMES) if with_graphlets else [])
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in sorted(rows, key=lambda r: r.graph_id):
            line = [r.graph_id, r.model, r.n, r.m, fmt(r.density)] + [fmt(v) for v in r.features]
            if with_graphlets:
                line += [str(c) for c in r.graphlets]
            w.writerow(line)


def read_feature_csv(path) -> list[FeatureRow]:
    with Path(path).open() as fh:
        reader = csv.DictReader(fh)
        missing = set(CSV_BASE + FEATURE_NAMES) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        has_g = set(GRAPHLET_NAMES) <= set(reader.fieldnames)
        rows = []
        for r in reader:
            rows.append(FeatureRow(
                r["graph_id"], r["model"], int(r["n"]), int(r["m"]), float(r["density"]),
                tuple(float(r[c]) for c in FEATURE_NAMES),
                tuple(int(r[c]) for c in GRAPHLET_NAMES) if has_g else None,
            ))
    return rows


def to_dataset(rows: list[FeatureRow], feature_set: str = "gmscn",
               class_list: tuple[str, ...] = ()) -> LabeledDataset:
    """Build a classification dataset from feature rows.

    ``feature_set`` is ``gmscn`` (the ten structural features), ``graphlets``
    (log10(1 + count) of the eight graphlet counts) or ``all``.
    """
    if feature_set not in ("gmscn", "graphlets", "all"):
        raise ValueError(f"unknown feature set {feature_set!r}")
    names: list[str] = []
    blocks = []
    if feature_set in ("gmscn", "all"):
        names += FEATURE_NAMES
        blocks.append(np.array([r.features for r in rows], dtype=np.float64).reshape(len(rows), -1))
    if feature_set in ("graphlets", "all"):
        if any(r.graphlets is None for r in rows):
            raise ValueError("graphlet columns missing; extract with graphlets enabled")
        names += GRAPHLET_NAMES
        blocks.append(np.log10(1.0 + np.array([r.graphlets for r in rows], dtype=np.float64)))
    X = np.hstack(blocks)
    return LabeledDataset(tuple(names), [r.graph_id for r in rows], [r.model for r in rows],
                          X, class_list)


def row_columns(row: FeatureRow) -> dict[str, float]:
    """Every named column a row can supply, graphlets log-transformed."""
    cols = dict(zip(FEATURE_NAMES, row.features))
    if row.graphlets is not None:
        cols.update(zip(GRAPHLET_NAMES, np.log10(1.0 + np.array(row.graphlets, dtype=np.float64))))
    return cols


def feature_matrix(rows: list[FeatureRow], names) -> np.ndarray:
    try:
        return np.array([[row_columns(r)[c] for c in names] for r in rows], dtype=np.float64)
    except KeyError as exc:
        raise ValueError(f"feature column {exc.args[0]} not available") from None
