"""Scaled-down end-to-end run: positives -> rule negatives -> prepare -> lexicon -> train -> evaluate.

    python3 scripts/run_smoke.py --workdir runs/smoke

Everything goes through the ``rxnjudge`` CLI so the run doubles as a CLI check.
"""
import argparse
import sys
import time
from pathlib import Path

from rxnjudge.cli import main as cli
from rxnjudge.synthetic import uspto_like

CONFIG = """embedding_dim={d}
hidden_dim={h}
epochs={epochs}
batch_size=64
learning_rate=0.003
seed={seed}
"""


def run(argv):
    print("$ rxnjudge " + " ".join(argv), flush=True)
    code = cli(argv)
    if code:
        sys.exit(code)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--workdir", default="runs/smoke", help="output directory")
    ap.add_argument("--positives", type=int, default=5000, help="synthetic positives")
    ap.add_argument("--cap", type=int, default=500, help="rule-generated negatives")
    ap.add_argument("--epochs", type=int, default=4)
    ap.add_argument("--embedding-dim", type=int, default=32)
    ap.add_argument("--hidden-dim", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    wd = Path(args.workdir)
    wd.mkdir(parents=True, exist_ok=True)
    pos = wd / "positives.txt"
    pos.write_text("\n".join(uspto_like(args.positives, seed=args.seed)) + "\n", encoding="utf-8")
    cfg = wd / "smoke.cfg"
    cfg.write_text(CONFIG.format(d=args.embedding_dim, h=args.hidden_dim, epochs=args.epochs,
                                 seed=args.seed), encoding="utf-8")
    t0 = time.perf_counter()
    run(["gen-negatives", "--positives", str(pos), "--cap", str(args.cap),
         "--out", str(wd / "negatives.tsv"), "--config", str(cfg)])
    run(["prepare", "--input", str(pos), "--label-mode", "positive",
         "--input", str(wd / "negatives.tsv"), "--label-mode", "column",
         "--out", str(wd / "prep"), "--config", str(cfg)])
    run(["lexicon", "build", "--train", str(wd / "prep/train.tsv"), "--out", str(wd / "lexicon.tsv"),
         "--config", str(cfg)])
    run(["train", "--config", str(cfg), "--train", str(wd / "prep/train.tsv"),
         "--dev", str(wd / "prep/dev.tsv"), "--lexicon", str(wd / "lexicon.tsv"),
         "--out", str(wd / "model.ckpt")])
    run(["evaluate", "--checkpoint", str(wd / "model.ckpt"), "--test", str(wd / "prep/test.tsv"),
         "--sweep", "--report-dir", str(wd / "report")])
    print(f"done in {time.perf_counter() - t0:.0f}s; reports under {wd / 'report'}")


if __name__ == "__main__":
    main()
