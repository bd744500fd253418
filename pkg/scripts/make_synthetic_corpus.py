"""Write a USPTO-style synthetic reaction corpus, one reaction per line.

    python3 scripts/make_synthetic_corpus.py --n 5000 --seed 0 --out data/positives.txt
"""
import argparse
from pathlib import Path

from rxnjudge.synthetic import uspto_like


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5000, help="number of distinct reactions")
    ap.add_argument("--seed", type=int, default=0, help="generator seed")
    ap.add_argument("--out", required=True, help="output text file")
    args = ap.parse_args()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(uspto_like(args.n, args.seed)) + "\n", encoding="utf-8")
    print(f"wrote {args.n} reactions to {out}")


if __name__ == "__main__":
    main()
