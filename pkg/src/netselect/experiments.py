"""Experiment configs, evaluation harnesses and run manifests.

Every harness is a pure function of its config and master seed.  Seeds for
the separate random streams (training corpus, test corpus, folds, rewiring)
are derived with :func:`stream_seed`, so one integer fixes a whole run.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
import logging
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np
import yaml
from scipy.stats import spearmanr

from .classifier import (EvalMetrics, LabeledDataset, cross_validate, evaluate,
                         predict, train_greedy_tree, train_ladtree)
from .corpus import FeatureRow, extract_row, extract_rows, fmt, to_dataset
from .features import DEGDIST_NAMES
from .generators import (MODELS, DatasetSpec, GeneratorError, Instance, build_dataset, child_seed,
                         snap_density_pa)
from .graph import Graph, density, rewire_random

__version__ = "0.1.0"
log = logging.getLogger(__name__)

# stream ordinals sit above the model ordinals used for per-graph seeds
STREAMS = {"train": 64, "test": 65, "folds": 66, "noise": 67, "features": 68}
LEARNERS = ("ladtree", "greedy")


def stream_seed(master_seed: int, stream: str, index: int = 0) -> int:
    return child_seed(master_seed, STREAMS[stream], index)


@dataclass
class ExperimentConfig:
    models: tuple[str, ...] = MODELS
    n: int = 1024                     # training graph size
    per_model: int = 30
    density: float = 0.004            # raw target, snapped to a PA-representable value at n
    test_sizes: tuple[int, ...] = (2048,)
    test_per_model: int = 10
    learner: str = "ladtree"
    iterations: int = 10
    folds: int = 10
    feature_set: str = "gmscn"
    noise_fractions: tuple[float, ...] = tuple(round(0.05 * i, 2) for i in range(21))
    noise_learners: tuple[str, ...] = LEARNERS
    mask: tuple[str, ...] = DEGDIST_NAMES
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        for name in ("models", "test_sizes", "noise_fractions", "noise_learners", "mask"):
            setattr(self, name, tuple(getattr(self, name)))
        unknown = set(self.models) - set(MODELS)
        if unknown:
            raise ValueError(f"unknown models {sorted(unknown)}")
        for lr in (self.learner, *self.noise_learners):
            if lr not in LEARNERS:
                raise ValueError(f"unknown learner {lr!r}")
        if not 0 < self.density < 1:
            raise ValueError("density must be in (0, 1)")
        if self.n < 8 or any(s < 8 for s in self.test_sizes):
            raise ValueError("graph sizes must be >= 8")
        if not self.test_sizes or not self.noise_fractions or not self.noise_learners:
            raise ValueError("test_sizes, noise_fractions and noise_learners must be nonempty")
        if any(not 0 <= f <= 1 for f in self.noise_fractions):
            raise ValueError("noise fractions must lie in [0, 1]")
        if self.feature_set not in ("gmscn", "graphlets", "all"):
            raise ValueError(f"unknown feature set {self.feature_set!r}")
        if self.per_model < 1 or self.test_per_model < 1 or self.folds < 2 or self.iterations < 1:
            raise ValueError("per_model, test_per_model >= 1, folds >= 2, iterations >= 1")

    @property
    def snapped_density(self) -> float:
        """The experiment density: snapped once, at the training size."""
        return snap_density_pa(self.n, self.density)

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


def load_config(path=None, **overrides) -> ExperimentConfig:
    raw = {}
    if path is not None:
        raw = yaml.safe_load(Path(path).read_text()) or {}
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: config must be a mapping")
    known = {f.name for f in fields(ExperimentConfig)}
    extra = set(raw) - known
    if extra:
        raise ValueError(f"unknown config keys {sorted(extra)}")
    raw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**raw)


# -- corpus stages ------------------------------------------------------------

def make_corpus(cfg: ExperimentConfig, n: int, per_model: int, stream: str,
                index: int = 0) -> list[Instance]:
    spec = DatasetSpec(models=cfg.models, per_model_count=per_model, n=n,
                       density_target=cfg.snapped_density,
                       master_seed=stream_seed(cfg.seed, stream, index))
    return build_dataset(spec, workers=cfg.threads)


def instance_rows(cfg: ExperimentConfig, instances, graphlets: bool | None = None) -> list[FeatureRow]:
    if graphlets is None:
        graphlets = cfg.feature_set != "gmscn"
    return extract_rows([(i.graph_id, i.model, i.graph) for i in instances], graphlets,
                        stream_seed(cfg.seed, "features"), cfg.threads)


def fit(cfg: ExperimentConfig, ds: LabeledDataset, learner: str | None = None):
    learner = learner or cfg.learner
    if learner == "greedy":
        return train_greedy_tree(ds)
    return train_ladtree(ds, cfg.iterations)


def learner_fn(cfg: ExperimentConfig, learner: str | None = None):
    return lambda ds: fit(cfg, ds, learner)


# -- harnesses ----------------------------------------------------------------

def run_cv(cfg: ExperimentConfig, ds: LabeledDataset, learner: str | None = None) -> EvalMetrics:
    return cross_validate(ds, cfg.folds, learner_fn(cfg, learner), stream_seed(cfg.seed, "folds"))


@dataclass
class NoiseResult:
    fractions: tuple[float, ...]
    accuracy: dict[str, list[float]]     # learner -> accuracy per fraction

    def spearman(self, learner: str = "ladtree") -> float:
        return float(spearmanr(self.fractions, self.accuracy[learner]).statistic)


def run_noise(cfg: ExperimentConfig, train_rows: list[FeatureRow],
              test: list[Instance]) -> NoiseResult:
    """Train on clean graphs; rewire every test graph by each fraction and score."""
    train = to_dataset(train_rows, cfg.feature_set, cfg.models)
    models = {lr: fit(cfg, train, lr) for lr in cfg.noise_learners}
    acc: dict[str, list[float]] = {lr: [] for lr in cfg.noise_learners}
    for k, f in enumerate(cfg.noise_fractions):
        noisy = [(i.graph_id, i.model, rewire_random(i.graph, f, stream_seed(cfg.seed, "noise", (k << 20) + j)))
                 for j, i in enumerate(test)]
        rows = extract_rows(noisy, cfg.feature_set != "gmscn", stream_seed(cfg.seed, "features"),
                            cfg.threads)
        ds = to_dataset(rows, cfg.feature_set, cfg.models)
        for lr, model in models.items():
            acc[lr].append(evaluate(model, ds).accuracy)
    return NoiseResult(cfg.noise_fractions, acc)


@dataclass
class SizeResult:
    train_n: int
    density: float
    cv_accuracy: float                       # in-size CV at the training size
    test_accuracy: dict[int, float]          # test size -> accuracy of the train-size model
    mixed_cv_accuracy: float                 # CV over the pooled multi-size corpus
    test_metrics: dict[int, EvalMetrics] = field(default_factory=dict)


def run_size(cfg: ExperimentConfig) -> SizeResult:
    train_rows = instance_rows(cfg, make_corpus(cfg, cfg.n, cfg.per_model, "train"))
    train = to_dataset(train_rows, cfg.feature_set, cfg.models)
    cv = run_cv(cfg, train)
    model = fit(cfg, train)
    acc, mets, pooled = {}, {}, list(train_rows)
    for k, n in enumerate(cfg.test_sizes):
        rows = instance_rows(cfg, make_corpus(cfg, n, cfg.test_per_model, "test", k))
        mets[n] = evaluate(model, to_dataset(rows, cfg.feature_set, cfg.models))
        acc[n] = mets[n].accuracy
        pooled += rows
    mixed = run_cv(cfg, to_dataset(pooled, cfg.feature_set, cfg.models))
    return SizeResult(cfg.n, cfg.snapped_density, cv.accuracy, acc, mixed.accuracy, mets)


@dataclass
class AblationResult:
    mask: tuple[str, ...]
    full_accuracy: float
    masked_accuracy: float

    @property
    def drop(self) -> float:
        return self.full_accuracy - self.masked_accuracy


def run_ablate(cfg: ExperimentConfig, ds: LabeledDataset) -> AblationResult:
    unknown = set(cfg.mask) - set(ds.feature_names)
    if unknown:
        raise ValueError(f"mask names unknown features {sorted(unknown)}")
    if len(set(cfg.mask)) >= len(ds.feature_names):
        raise ValueError("mask must leave at least one feature")
    full = run_cv(cfg, ds).accuracy
    masked = run_cv(cfg, ds.drop(cfg.mask)).accuracy if cfg.mask else full
    return AblationResult(cfg.mask, full, masked)


@dataclass
class Selection:
    label: str
    probabilities: dict[str, float]
    target_density: float
    corpus_density: float
    n_train: int
    achieved_density: dict[str, float] = field(default_factory=dict)   # model -> corpus mean
    skipped: dict[str, str] = field(default_factory=dict)              # model -> failure


def select(target: Graph, cfg: ExperimentConfig) -> Selection:
    """Pick the model whose synthetic graphs look most like ``target``.

    The corpus is built at ``cfg.n`` whatever the target's size; only the
    target's density is used, snapped at ``cfg.n``.  A model whose
    calibration fails is left out with a warning.
    """
    target_density = density(target)
    run = ExperimentConfig(**{**asdict(cfg), "density": target_density})
    insts, skipped = [], {}
    for model in run.models:
        # per-graph seeds depend only on (stream seed, model, index), so
        # building one model at a time gives the same graphs as one joint build
        try:
            insts += make_corpus(replace(run, models=(model,)), run.n, run.per_model, "train")
        except GeneratorError as exc:
            log.warning("selection skips %s: %s", model, exc)
            skipped[model] = str(exc)
    kept = tuple(m for m in run.models if m not in skipped)
    if len(kept) < 2:
        raise GeneratorError(f"only {len(kept)} model(s) could be generated at density {target_density:.6g}")
    run = replace(run, models=kept)
    rows = instance_rows(run, insts)
    model = fit(run, to_dataset(rows, run.feature_set, run.models))
    # the label is a placeholder; only the feature columns are used
    row = extract_row("target", run.models[0], target, run.feature_set != "gmscn",
                      stream_seed(run.seed, "features"))
    feats = to_dataset([row], run.feature_set, run.models).X[0]
    label, proba = predict(model, feats)
    achieved = {m: float(np.mean([r.density for r in rows if r.model == m])) for m in kept}
    return Selection(label, proba, target_density, run.snapped_density, run.n, achieved, skipped)


# -- reports and manifests ------------------------------------------------------

def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return path


def write_metrics(m: EvalMetrics, out_dir, prefix: str) -> list[Path]:
    out = Path(out_dir)
    per_class = [(c, "" if m.precision[c] is None else m.precision[c],
                  "" if m.recall[c] is None else m.recall[c]) for c in m.class_list]
    a = write_csv(out / f"{prefix}_metrics.csv", ("class", "precision", "recall"),
                  per_class + [("overall_accuracy", m.accuracy, m.accuracy)])
    b = write_csv(out / f"{prefix}_confusion.csv", ("true\\predicted", *m.class_list),
                  [(c, *map(int, row)) for c, row in zip(m.class_list, m.confusion)])
    return [a, b]


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    """What a run did: command, full config, derived density and output hashes.

    Wall-clock timings go to a separate ``timings.json`` so the manifest
    itself is byte-identical across reruns.
    """
    command: str
    config: dict
    config_hash: str
    version: str
    seeds: dict[str, int]
    density_target: float
    density_snapped: float
    n_train: int
    outputs: dict[str, str] = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def add(self, *paths) -> None:
        for p in paths:
            self.outputs[Path(p).name] = sha256(p)

    def write(self, out_dir, timings: dict | None = None) -> Path:
        out = Path(out_dir)
        path = out / "manifest.json"
        path.write_text(json.dumps(asdict(self), sort_keys=True, indent=1) + "\n")
        if timings is not None:
            (out / "timings.json").write_text(json.dumps(timings, sort_keys=True, indent=1) + "\n")
        return path


def config_hash(config: dict) -> str:
    """sha256 of the canonical JSON form; stable under re-serialization."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def manifest_for(command: str, cfg: ExperimentConfig, density_target: float | None = None) -> RunManifest:
    d = cfg.density if density_target is None else density_target
    config = cfg.to_dict()
    # worker count never changes results, so it stays out of the manifest
    config.pop("threads")
    seeds = {"master": cfg.seed, **{k: stream_seed(cfg.seed, k) for k in STREAMS}}
    return RunManifest(command, config, config_hash(config), __version__, seeds,
                       d, snap_density_pa(cfg.n, d), cfg.n)


class Stopwatch:
    def __init__(self):
        self.t0 = time.perf_counter()
        self.laps: dict[str, float] = {}

    def lap(self, name: str) -> None:
        now = time.perf_counter()
        self.laps[name] = round(now - self.t0, 3)
        self.t0 = now
