"""Ablation (4 cells) and incremental (ratios 0.1..1.0) grids on synthetic data.

    python3 scripts/run_experiments.py --out reports --positives 3000 --epochs 3

The incremental pool is a second batch of labeled reactions (fresh positives
plus their rule negatives), mixed into the base training split by ratio.
"""
import argparse
import json
import random

from rxnjudge import datasets as ds
from rxnjudge.config import Config
from rxnjudge.experiment import ExperimentPlan, run_experiment
from rxnjudge.synthetic import uspto_like


def labeled(texts, cap, seed):
    pos = ds.deduplicate(ds.parse_line(t, "positive") for t in texts)
    negs = ds.generate_negatives(pos, ds.default_rules(), ds.known_positive_index(pos), cap, seed)
    return ds.deduplicate(pos + negs)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="reports", help="report root")
    ap.add_argument("--name", default="synthetic", help="experiment name")
    ap.add_argument("--positives", type=int, default=3000)
    ap.add_argument("--pool", type=int, default=2000, help="positives in the incremental pool")
    ap.add_argument("--epochs", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--skip-incremental", action="store_true")
    args = ap.parse_args()

    texts = uspto_like(args.positives + args.pool, seed=args.seed)
    base = labeled(texts[:args.positives], args.positives // 10, args.seed)
    pool = [] if args.skip_incremental else labeled(texts[args.positives:], args.pool // 10, args.seed + 1)
    # pool order decides what each ratio adds; mix labels rather than positives-first
    random.Random(args.seed).shuffle(pool)
    parts = ds.split(base, args.seed)
    cfg = Config(embedding_dim=32, hidden_dim=64, epochs=args.epochs, batch_size=64,
                 learning_rate=3e-3, seed=args.seed)
    plan = ExperimentPlan(args.name, args.out, parts.train, parts.dev, parts.test, cfg,
                          incremental_pool=pool)
    manifest = run_experiment(plan)
    print(json.dumps({c: {k: e.get(k) for k in ("status", "train_size", "accuracy", "auc")}
                      for c, e in manifest["cells"].items()}, indent=1))


if __name__ == "__main__":
    main()
