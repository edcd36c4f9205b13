"""Command-line entry point: ``netselect <command> [options]``.

Failures exit nonzero and print one JSON line to stderr,
``{"error": <category>, "message": ...}``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import experiments as ex
from .classifier import ModelFileError, TrainingError, load_model, predict_batch, save_model
from .corpus import (extract_row, extract_rows, feature_matrix, read_corpus, read_feature_csv,
                     to_dataset, write_corpus, write_feature_csv)
from .generators import CalibrationError, DatasetBuildError, GeneratorError
from .graph import EdgeListError, load_edge_list
from .graphlets import GRAPHLET_NAMES

EXIT_CODES = {"internal": 1, "usage": 2, "input": 3, "generation": 4, "training": 5, "model": 6}


class CliError(Exception):
    def __init__(self, category: str, message: str):
        super().__init__(message)
        self.category = category


def _config(args, **overrides) -> ex.ExperimentConfig:
    return ex.load_config(args.config, seed=args.seed, threads=args.threads, **overrides)


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _rows_or_corpus(args, cfg):
    """Feature rows from a CSV argument, or from a fresh training corpus."""
    if getattr(args, "features", None):
        return read_feature_csv(args.features)
    return ex.instance_rows(cfg, ex.make_corpus(cfg, cfg.n, cfg.per_model, "train"))


# -- commands -------------------------------------------------------------------

def cmd_gen(args):
    cfg = _config(args, n=args.n, per_model=args.per_model, density=args.density,
                  models=args.models)
    out = _out(args)
    man = ex.manifest_for("gen", cfg)
    insts = ex.make_corpus(cfg, cfg.n, cfg.per_model, "train")
    files = write_corpus(insts, out)
    man.add(files[-1])
    man.write(out)
    print(f"{len(insts)} graphs -> {out}")


def cmd_extract(args):
    cfg = _config(args)
    out = _out(args)
    entries = read_corpus(args.corpus)
    rows = extract_rows([(e.graph_id, e.model, e.path) for e in entries], args.graphlets,
                        ex.stream_seed(cfg.seed, "features"), cfg.threads)
    path = out / "features.csv"
    write_feature_csv(rows, path)
    print(f"{len(rows)} rows -> {path}")


def cmd_train(args):
    cfg = _config(args, learner=args.learner, iterations=args.iters, feature_set=args.feature_set)
    out = _out(args)
    rows = read_feature_csv(args.features)
    ds = to_dataset(rows, cfg.feature_set, tuple(sorted({r.model for r in rows})))
    model = ex.fit(cfg, ds)
    path = out / "model.json"
    save_model(model, path)
    print(f"model -> {path}")


def cmd_predict(args):
    """Classify edge-list files, or every row of a feature CSV (``*.csv``)."""
    cfg = _config(args)
    model = load_model(args.model)
    need_graphlets = any(c in GRAPHLET_NAMES for c in model.feature_names)
    rows = []
    for p in args.graphs:
        if str(p).endswith(".csv"):
            rows += read_feature_csv(p)
        else:
            rows.append(extract_row(str(p), "", load_edge_list(p), need_graphlets,
                                    ex.stream_seed(cfg.seed, "features")))
    labels, P = predict_batch(model, feature_matrix(rows, model.feature_names))
    header = ("graph", "true", "label", *model.class_list)
    path = ex.write_csv(_out(args) / "predictions.csv", header,
                        [(r.graph_id, r.model, lab, *p)
                         for r, lab, p in zip(rows, labels, P.tolist())])
    for r, lab in zip(rows, labels):
        print(f"{r.graph_id}\t{lab}")


def cmd_select(args):
    cfg = _config(args, n=args.n_train, per_model=args.per_model)
    out = _out(args)
    target = load_edge_list(args.graph)
    sel = ex.select(target, cfg)
    ranked = sorted(sel.probabilities.items(), key=lambda kv: (-kv[1], kv[0]))
    path = ex.write_csv(out / "selection.csv", ("rank", "model", "confidence", "achieved_density"),
                        [(i + 1, m, p, sel.achieved_density[m]) for i, (m, p) in enumerate(ranked)])
    man = ex.manifest_for("select", cfg, sel.target_density)
    man.extra = {"selected": sel.label, "skipped_models": sel.skipped}
    man.add(path)
    man.write(out)
    for m in sel.skipped:
        print(f"warning: {m} left out (calibration failed)", file=sys.stderr)
    print(sel.label)


def cmd_eval_cv(args):
    cfg = _config(args, learner=args.learner, iterations=args.iters, feature_set=args.feature_set)
    out = _out(args)
    sw = ex.Stopwatch()
    rows = _rows_or_corpus(args, cfg)
    sw.lap("corpus")
    m = ex.run_cv(cfg, to_dataset(rows, cfg.feature_set, tuple(sorted({r.model for r in rows}))))
    sw.lap("cv")
    man = ex.manifest_for("eval-cv", cfg)
    man.add(*ex.write_metrics(m, out, "cv"))
    man.write(out, sw.laps)
    print(f"accuracy {m.accuracy:.4f}")


def cmd_eval_noise(args):
    cfg = _config(args)
    out = _out(args)
    sw = ex.Stopwatch()
    train = ex.instance_rows(cfg, ex.make_corpus(cfg, cfg.n, cfg.per_model, "train"))
    test = ex.make_corpus(cfg, cfg.n, cfg.test_per_model, "test")
    sw.lap("corpus")
    res = ex.run_noise(cfg, train, test)
    sw.lap("noise")
    path = ex.write_csv(out / "noise.csv", ("fraction", *cfg.noise_learners),
                        [(f, *(res.accuracy[lr][k] for lr in cfg.noise_learners))
                         for k, f in enumerate(res.fractions)])
    man = ex.manifest_for("eval-noise", cfg)
    man.extra = {f"spearman_{lr}": res.spearman(lr) for lr in cfg.noise_learners}
    man.add(path)
    man.write(out, sw.laps)
    print(path.read_text(), end="")


def cmd_eval_size(args):
    cfg = _config(args)
    out = _out(args)
    sw = ex.Stopwatch()
    res = ex.run_size(cfg)
    sw.lap("size")
    rows = [("cv", cfg.n, cfg.n, res.cv_accuracy)]
    rows += [("train_test", cfg.n, n, a) for n, a in res.test_accuracy.items()]
    rows += [("mixed_cv", "mixed", "mixed", res.mixed_cv_accuracy)]
    path = ex.write_csv(out / "size.csv", ("kind", "train_n", "test_n", "accuracy"), rows)
    man = ex.manifest_for("eval-size", cfg)
    man.add(path)
    man.write(out, sw.laps)
    print(path.read_text(), end="")


def cmd_eval_ablate(args):
    cfg = _config(args, mask=args.mask)
    out = _out(args)
    sw = ex.Stopwatch()
    rows = _rows_or_corpus(args, cfg)
    ds = to_dataset(rows, cfg.feature_set, tuple(sorted({r.model for r in rows})))
    res = ex.run_ablate(cfg, ds)
    sw.lap("ablate")
    path = ex.write_csv(out / "ablate.csv", ("features", "accuracy"),
                        [("all", res.full_accuracy),
                         ("without " + " ".join(res.mask), res.masked_accuracy)])
    man = ex.manifest_for("eval-ablate", cfg)
    man.add(path)
    man.write(out, sw.laps)
    print(path.read_text(), end="")


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--config", default=argparse.SUPPRESS, help="YAML experiment config")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker processes")

    p = argparse.ArgumentParser(prog="netselect", parents=[common],
                                description="Select a generative model for a network.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(func=fn)
        return sp

    def learner_opts(sp):
        sp.add_argument("--learner", choices=ex.LEARNERS)
        sp.add_argument("--iters", type=int, help="boosting iterations")
        sp.add_argument("--feature-set", choices=("gmscn", "graphlets", "all"))

    sp = add("gen", cmd_gen, "generate a labeled synthetic corpus")
    sp.add_argument("--n", type=int)
    sp.add_argument("--per-model", type=int)
    sp.add_argument("--density", type=float)
    sp.add_argument("--models", nargs="+")

    sp = add("extract", cmd_extract, "extract features from a corpus directory")
    sp.add_argument("corpus")
    sp.add_argument("--graphlets", action="store_true", help="also count graphlets")

    sp = add("train", cmd_train, "train a classifier on a feature CSV")
    sp.add_argument("features")
    learner_opts(sp)

    sp = add("predict", cmd_predict, "classify edge-list files with a saved model")
    sp.add_argument("model")
    sp.add_argument("graphs", nargs="+")

    sp = add("select", cmd_select, "build a corpus at the target density and classify the target")
    sp.add_argument("graph")
    sp.add_argument("--n-train", type=int)
    sp.add_argument("--per-model", type=int)

    sp = add("eval-cv", cmd_eval_cv, "stratified cross-validation")
    sp.add_argument("features", nargs="?")
    learner_opts(sp)

    add("eval-noise", cmd_eval_noise, "accuracy under random edge rewiring")
    add("eval-size", cmd_eval_size, "train at one size, test at others")

    sp = add("eval-ablate", cmd_eval_ablate, "cross-validation with features removed")
    sp.add_argument("features", nargs="?")
    sp.add_argument("--mask", nargs="+", help="feature columns to remove")
    return p


def _category(exc: BaseException) -> str:
    if isinstance(exc, CliError):
        return exc.category
    if isinstance(exc, (CalibrationError, DatasetBuildError, GeneratorError)):
        return "generation"
    if isinstance(exc, TrainingError):
        return "training"
    if isinstance(exc, ModelFileError):
        return "model"
    if isinstance(exc, (EdgeListError, FileNotFoundError, IsADirectoryError, ValueError)):
        return "input"
    return "internal"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for name, default in (("seed", None), ("out", "out"), ("config", None), ("threads", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except Exception as exc:  # noqa: BLE001 - mapped to an exit category
        cat = _category(exc)
        msg = exc.report() if isinstance(exc, DatasetBuildError) else str(exc)
        if isinstance(exc, DatasetBuildError):
            msg = f"{exc}; {msg}"
        print(json.dumps({"error": cat, "message": msg}), file=sys.stderr)
        if cat == "internal":
            logging.getLogger(__name__).exception("unexpected failure")
        return EXIT_CODES[cat]
    return 0


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
