"""Achieved density against target for every model, averaged over seeds.

    python scripts/run_calibration.py [--seeds 10]
"""

import numpy as np

from _common import parse
from netselect.experiments import stream_seed, write_csv
from netselect.generators import DENSITY_TOLERANCE, DatasetSpec, build_dataset
from netselect.graph import density


def extra(p):
    p.add_argument("--seeds", type=int, default=10)


args, cfg, out = parse(__doc__, extra=extra)
target = cfg.snapped_density
achieved = {m: [] for m in cfg.models}
for s in range(args.seeds):
    spec = DatasetSpec(models=cfg.models, per_model_count=1, n=cfg.n, density_target=target,
                       master_seed=stream_seed(cfg.seed + s, "train", 8))
    for inst in build_dataset(spec, workers=cfg.threads):
        achieved[inst.model].append(density(inst.graph))
rows = []
for m, v in achieved.items():
    err = float(np.mean(v)) / target - 1
    rows.append((m, target, float(np.mean(v)), err, DENSITY_TOLERANCE[m]))
    print(f"{m:4s} {100 * err:+6.1f}%  (tolerance ±{100 * DENSITY_TOLERANCE[m]:.0f}%)")
write_csv(out / "calibration.csv", ("model", "target", "achieved", "rel_error", "tolerance"), rows)
