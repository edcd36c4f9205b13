"""Accuracy as test graphs are progressively rewired, for both learners.

    python scripts/run_noise.py [--repeats 5]
"""

from dataclasses import replace

import numpy as np

from _common import parse
from netselect.experiments import instance_rows, make_corpus, run_noise, write_csv


def extra(p):
    p.add_argument("--repeats", type=int, default=1, help="corpus seeds to average over")


args, cfg, out = parse(__doc__, extra=extra)
curves = {lr: [] for lr in cfg.noise_learners}
for r in range(args.repeats):
    run = replace(cfg, seed=cfg.seed + r)
    train = instance_rows(run, make_corpus(run, run.n, run.per_model, "train"))
    test = make_corpus(run, run.n, run.test_per_model, "test")
    res = run_noise(run, train, test)
    for lr in cfg.noise_learners:
        curves[lr].append(res.accuracy[lr])
        print(f"seed {run.seed} {lr}: rho {res.spearman(lr):.3f}")
mean = {lr: np.mean(v, axis=0) for lr, v in curves.items()}
write_csv(out / "noise.csv", ("fraction", *cfg.noise_learners),
          [(f, *(mean[lr][k] for lr in cfg.noise_learners)) for k, f in enumerate(cfg.noise_fractions)])
for k, f in enumerate(cfg.noise_fractions):
    print(f"{f:.2f} " + " ".join(f"{mean[lr][k]:.3f}" for lr in cfg.noise_learners))
