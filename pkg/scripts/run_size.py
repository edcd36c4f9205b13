"""Train at one graph size, test at larger ones.

By default every size shares one density.  With --match-degree each test
corpus instead keeps the training mean degree, density * (n_train - 1).

    python scripts/run_size.py [--config configs/size.yaml] [--match-degree]
"""

from dataclasses import replace

from _common import parse
from netselect.classifier import evaluate
from netselect.corpus import to_dataset
from netselect.experiments import fit, instance_rows, make_corpus, run_cv, run_size, write_csv


def extra(p):
    p.add_argument("--match-degree", action="store_true")


args, cfg, out = parse(__doc__, "size.yaml", extra)
if not args.match_degree:
    res = run_size(cfg)
    rows = [("cv", cfg.n, cfg.n, res.cv_accuracy)]
    rows += [("train_test", cfg.n, n, a) for n, a in res.test_accuracy.items()]
    rows += [("mixed_cv", "mixed", "mixed", res.mixed_cv_accuracy)]
else:
    train_rows = instance_rows(cfg, make_corpus(cfg, cfg.n, cfg.per_model, "train"))
    train = to_dataset(train_rows, cfg.feature_set, cfg.models)
    model = fit(cfg, train)
    rows = [("cv", cfg.n, cfg.n, run_cv(cfg, train).accuracy)]
    mean_degree = cfg.snapped_density * (cfg.n - 1)
    for k, n in enumerate(cfg.test_sizes):
        test_cfg = replace(cfg, n=n, density=mean_degree / (n - 1))
        test = instance_rows(test_cfg, make_corpus(test_cfg, n, cfg.test_per_model, "test", k))
        acc = evaluate(model, to_dataset(test, cfg.feature_set, cfg.models)).accuracy
        rows.append(("train_test_matched_degree", cfg.n, n, acc))
name = "size_matched_degree.csv" if args.match_degree else "size.csv"
print(write_csv(out / name, ("kind", "train_n", "test_n", "accuracy"), rows).read_text(), end="")
