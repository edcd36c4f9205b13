"""Accuracy with the degree-distribution features removed, over several corpus seeds.

    python scripts/run_ablation.py [--repeats 5]
"""

from dataclasses import replace

import numpy as np

from _common import parse
from netselect.corpus import to_dataset
from netselect.experiments import instance_rows, make_corpus, run_ablate, write_csv


def extra(p):
    p.add_argument("--repeats", type=int, default=5)


args, cfg, out = parse(__doc__, extra=extra)
rows = []
for r in range(args.repeats):
    run = replace(cfg, seed=cfg.seed + r)
    ds = to_dataset(instance_rows(run, make_corpus(run, run.n, run.per_model, "train")),
                    run.feature_set, run.models)
    res = run_ablate(run, ds)
    rows.append((run.seed, res.full_accuracy, res.masked_accuracy, res.drop))
    print(f"seed {run.seed}: {res.full_accuracy:.4f} -> {res.masked_accuracy:.4f}")
write_csv(out / "ablation.csv", ("seed", "full", "masked", "drop"), rows)
print(f"mean drop {100 * np.mean([r[3] for r in rows]):.2f} points")
