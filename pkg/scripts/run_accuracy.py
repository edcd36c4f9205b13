"""Cross-validated accuracy of the structural features against the graphlet baseline.

    python scripts/run_accuracy.py [--config configs/default.yaml] [--seed 0]
"""

import time

from _common import parse
from netselect.corpus import to_dataset
from netselect.experiments import instance_rows, make_corpus, run_cv, write_csv, write_metrics

args, cfg, out = parse(__doc__)
t0 = time.perf_counter()
insts = make_corpus(cfg, cfg.n, cfg.per_model, "train")
rows = instance_rows(cfg, insts, graphlets=True)
print(f"corpus + features: {time.perf_counter() - t0:.1f} s, density {cfg.snapped_density:.7f}")

results = []
for fs in ("gmscn", "graphlets", "all"):
    for learner in ("ladtree", "greedy"):
        m = run_cv(cfg, to_dataset(rows, fs, cfg.models), learner)
        write_metrics(m, out, f"accuracy_{fs}_{learner}")
        results.append((fs, learner, m.accuracy))
        print(f"{fs:10s} {learner:8s} {m.accuracy:.4f}")
write_csv(out / "accuracy.csv", ("features", "learner", "accuracy"), results)
