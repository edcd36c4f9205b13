"""Shared argument handling for the experiment scripts."""

import argparse
import logging
from pathlib import Path

from netselect.experiments import load_config

ROOT = Path(__file__).resolve().parent.parent


def parse(description: str, default_config: str = "default.yaml", extra=None):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--config", default=str(ROOT / "configs" / default_config))
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--out", default=str(ROOT / "results"))
    if extra:
        extra(p)
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    cfg = load_config(args.config, seed=args.seed, threads=args.threads)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return args, cfg, out
