"""Command-line entry point: ``rxnjudge <subcommand> ...``.

Errors are reported as one line on stderr, ``error<TAB>Kind<TAB>message``.
Exit codes: 0 success, 1 other failure, 2 input/IO problems, 3 config errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import datasets as ds
from .config import Config, load_config
from .dlg import Lexicon, build_lexicon, segment
from .errors import (CheckpointError, ConfigError, EmptyCorpus, MalformedReaction,
                     RxnJudgeError, TooFewRecords, UnbalancedBrackets)
from .evaluation import full_report, roc_to_tsv, threshold_sweep, write_report
from .experiment import ExperimentPlan, fit, majority_baseline, run_experiment, score
from .pipeline import Artifacts, lexicon_corpus, sha256_file, side_streams
from .rsd import alignment_rows, generate_rsd
from .smiles_text import normalize_reaction, parse_reaction, tokenize_atomwise

log = logging.getLogger("rxnjudge")

EXIT_OK, EXIT_FAIL, EXIT_IO, EXIT_CONFIG = 0, 1, 2, 3


def _config(args) -> Config:
    cfg = load_config(getattr(args, "config", None))
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_overrides(seed=args.seed)
    return cfg


def _load_labeled(path) -> List[ds.LabeledReaction]:
    return ds.load_corpus(path, "column").records


def _write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# ------------------------------------------------------------------ prepare

def cmd_prepare(args) -> int:
    cfg = _config(args)
    modes = args.label_mode or ["column"]
    if len(modes) not in (1, len(args.input)):
        raise ConfigError("give one --label-mode, or one per --input")
    if len(modes) == 1:
        modes = modes * len(args.input)
    records, malformed, raw_count = [], 0, 0
    for path, mode in zip(args.input, modes):
        loaded = ds.load_corpus(path, mode, ds.REAL_FAILED if mode == "negative" else ds.CORPUS)
        records.extend(loaded.records)
        malformed += len(loaded.malformed)
        raw_count += len(loaded.records) + len(loaded.malformed)
    unique = ds.deduplicate(records)
    parts = ds.split(unique, cfg.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"seed": cfg.seed, "inputs": [str(p) for p in args.input],
                "lines_read": raw_count, "malformed": malformed,
                "records": len(records), "unique": len(unique),
                "counts": parts.counts(), "files": {}}
    for name in ("train", "dev", "test"):
        path = out / f"{name}.tsv"
        ds.write_records(path, getattr(parts, name))
        manifest["files"][name] = {"path": path.name, "sha256": sha256_file(path),
                                   "size": len(getattr(parts, name))}
    _write_json(out / "manifest.json", manifest)
    print(f"prepared\t{len(unique)}\t" + "\t".join(
        f"{k}={manifest['files'][k]['size']}" for k in ("train", "dev", "test")))
    return EXIT_OK


# ------------------------------------------------------------------ lexicon

def cmd_lexicon(args) -> int:
    if args.action == "apply":
        return _lexicon_apply(args)
    cfg = _config(args)
    records = _load_labeled(args.train)
    corpus = lexicon_corpus(r.reaction for r in records)
    lex = build_lexicon(corpus, args.max_n or cfg.lexicon_max_n,
                        cfg.lexicon_threshold if args.threshold is None else args.threshold,
                        args.min_count or cfg.lexicon_min_count)
    lex.save(args.out)
    _write_json(str(args.out) + ".manifest.json", {
        "source": str(args.train), "source_sha256": sha256_file(args.train),
        "entries": len(lex), "multi_token": len(lex.multi_token_words()),
        "sha256": sha256_file(args.out)})
    print(f"lexicon\t{len(lex)}\tmulti_token={len(lex.multi_token_words())}")
    return EXIT_OK


def _lexicon_apply(args) -> int:
    lex = Lexicon.load(args.lexicon)
    lines = [args.reaction] if args.reaction else Path(args.input).read_text(encoding="utf-8").splitlines()
    for line in lines:
        if not line.strip():
            continue
        text = line.split("\t")[-1]
        r = normalize_reaction(parse_reaction(text))
        src, tgt = side_streams(r)
        print(" ".join(segment(src, lex).words) + " > " + " ".join(segment(tgt, lex).words))
    return EXIT_OK


# ------------------------------------------------------------ gen-negatives

def _first_word(lex: Lexicon):
    def first(mol: str) -> str:
        words = segment(tokenize_atomwise(mol), lex).words
        return words[0] if words else ""
    return first


def cmd_gen_negatives(args) -> int:
    cfg = _config(args)
    positives = ds.load_corpus(args.positives, args.label_mode).records
    positives = [r for r in positives if r.label == 1]
    index = ds.known_positive_index(positives)
    for extra in args.known or []:
        index |= ds.known_positive_index(ds.load_corpus(extra, "positive").records)
    first_segment = ds.first_atom_token
    if args.lexicon:
        first_segment = _first_word(Lexicon.load(args.lexicon))
    rules = ds.default_rules(first_segment)
    if args.rules:
        rules.extend(ds.load_rules(args.rules))
    negatives = ds.generate_negatives(positives, rules, index, args.cap, seed=cfg.seed)
    n = ds.write_records(args.out, negatives)
    print(f"negatives\t{n}")
    return EXIT_OK


# ---------------------------------------------------------------------- rsd

def cmd_rsd(args) -> int:
    if args.reaction:
        r = normalize_reaction(parse_reaction(args.reaction))
        src, tgt = side_streams(r)
    else:
        src, tgt = tokenize_atomwise(args.source), tokenize_atomwise(args.target)
    for row in alignment_rows(src, generate_rsd(src, tgt), tgt):
        print(row)
    return EXIT_OK


# -------------------------------------------------------------------- train

def cmd_train(args) -> int:
    cfg = _config(args)
    train_path = args.train or cfg.train_path
    dev_path = args.dev or cfg.dev_path
    out = args.out or cfg.checkpoint_path
    if not train_path or not out:
        raise ConfigError("train needs --train (or train_path) and --out (or checkpoint_path)")
    lexicon_path = args.lexicon or cfg.lexicon_path
    lexicon = Lexicon.load(lexicon_path) if (lexicon_path and cfg.use_dlg) else None
    train_records = _load_labeled(train_path)
    dev_records = _load_labeled(dev_path) if dev_path else []
    if not train_records:
        raise EmptyCorpus(f"no usable records in {train_path}")

    def progress(s):
        print(f"epoch\t{s.epoch}\ttrain_loss={s.train_loss:.6f}\ttrain_acc={s.train_accuracy:.4f}"
              f"\tdev_loss={s.dev_loss}\tdev_acc={s.dev_accuracy}", flush=True)

    artifacts, result = fit(train_records, dev_records, cfg, lexicon=lexicon,
                            progress=None if args.quiet else progress)
    artifacts.extra["provenance"] = {
        "train_path": str(train_path), "train_sha256": sha256_file(train_path),
        "dev_sha256": sha256_file(dev_path) if dev_path else None,
        "lexicon_path": str(lexicon_path) if lexicon is not None else None,
        "lexicon_sha256": sha256_file(lexicon_path) if lexicon is not None else None,
        "config_path": str(args.config) if args.config else None,
        "checkpoint_path": str(out),
    }
    artifacts.save(out)
    print(f"trained\tbest_epoch={result.best_epoch}\tcheckpoint={out}")
    return EXIT_OK


# ------------------------------------------------------------------ predict

def cmd_predict(args) -> int:
    art = Artifacts.load(args.checkpoint)
    texts = list(args.reaction or [])
    if args.input:
        texts += [ln.split("\t")[-1] for ln in Path(args.input).read_text(encoding="utf-8").splitlines()
                  if ln.strip()]
    for text in texts:
        pred = art.predict(text, args.threshold)
        print(f"{pred.probability:.6f}\t{pred.label}")
    return EXIT_OK


# ----------------------------------------------------------------- evaluate

def cmd_evaluate(args) -> int:
    art = Artifacts.load(args.checkpoint)
    records = _load_labeled(args.test)
    threshold = art.threshold if args.threshold is None else args.threshold
    preds = score(art, records)
    report = full_report(preds, threshold)
    sweep = threshold_sweep(preds) if args.sweep else None
    if args.report_dir:
        write_report(args.report_dir, report, sweep)
    if args.roc_out and report.roc is not None:
        Path(args.roc_out).write_text(roc_to_tsv(report.roc), encoding="utf-8")
    sys.stdout.write(report.to_kv())
    print(f"majority_baseline={majority_baseline(records)}")
    if sweep is not None:
        sys.stdout.write(sweep.to_tsv())
        print(f"best_threshold={sweep.best_threshold}")
    return EXIT_OK


# --------------------------------------------------------------- experiment

def cmd_experiment(args) -> int:
    cfg = _config(args)
    train_path = args.train or cfg.train_path
    dev_path = args.dev or cfg.dev_path
    test_path = args.test or cfg.test_path
    if not (train_path and test_path):
        raise ConfigError("experiment needs train and test files")
    pool_path = args.incremental_pool or cfg.incremental_pool_path
    plan = ExperimentPlan(
        name=args.name, out_dir=args.out or cfg.report_dir or "reports",
        train=_load_labeled(train_path), dev=_load_labeled(dev_path) if dev_path else [],
        test=_load_labeled(test_path), config=cfg, ablation=not args.no_ablation,
        incremental_pool=_load_labeled(pool_path) if pool_path else [])
    manifest = run_experiment(plan)
    for cell, entry in manifest["cells"].items():
        print(f"{cell}\t{entry['status']}\taccuracy={entry.get('accuracy')}")
    return EXIT_OK


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rxnjudge", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(sp):
        sp.add_argument("--config", help="key=value config file")
        sp.add_argument("--seed", type=int, help="override the config seed")
        return sp

    sp = with_config(sub.add_parser("prepare", help="clean, deduplicate and split a corpus"))
    sp.add_argument("--input", action="append", required=True, help="corpus file (repeatable)")
    sp.add_argument("--label-mode", action="append", choices=ds.LABEL_MODES,
                    help="column (label<TAB>reaction) or a fixed label; one or one per --input")
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_prepare)

    sp = with_config(sub.add_parser("lexicon", help="build or apply a DLG lexicon"))
    sp.add_argument("action", choices=("build", "apply"))
    sp.add_argument("--train", help="prepared training split (build)")
    sp.add_argument("--out", help="lexicon TSV to write (build)")
    sp.add_argument("--max-n", type=int, help="longest candidate in tokens")
    sp.add_argument("--threshold", type=float, help="minimum DLG in bits")
    sp.add_argument("--min-count", type=int, help="minimum candidate occurrences")
    sp.add_argument("--lexicon", help="lexicon TSV to read (apply)")
    sp.add_argument("--input", help="reaction file to segment (apply)")
    sp.add_argument("--reaction", help="single reaction to segment (apply)")
    sp.set_defaults(func=cmd_lexicon)

    sp = with_config(sub.add_parser("gen-negatives", help="rule-generated negative reactions"))
    sp.add_argument("--positives", required=True, help="positive reactions to derive negatives from")
    sp.add_argument("--label-mode", default="positive", choices=ds.LABEL_MODES,
                    help="how to read --positives (default: positive)")
    sp.add_argument("--known", action="append", help="extra known-positive file (repeatable)")
    sp.add_argument("--rules", help="token rewrite rules, LHS<TAB>RHS per line")
    sp.add_argument("--lexicon", help="lexicon used to find first segments for swaps")
    sp.add_argument("--cap", type=int, default=100_000, help="maximum number of negatives")
    sp.add_argument("--out", required=True, help="labeled TSV to write")
    sp.set_defaults(func=cmd_gen_negatives)

    sp = sub.add_parser("rsd", help="show the RSD alignment of a reaction")
    sp.add_argument("reaction", nargs="?", help="reactants>reagents>products")
    sp.add_argument("--source", help="source molecule string")
    sp.add_argument("--target", help="target molecule string")
    sp.set_defaults(func=cmd_rsd)

    sp = with_config(sub.add_parser("train", help="train the Siamese BiLSTM"))
    sp.add_argument("--train", help="labeled training split (or train_path)")
    sp.add_argument("--dev", help="labeled dev split for model selection (or dev_path)")
    sp.add_argument("--lexicon", help="prebuilt lexicon (default: build from --train)")
    sp.add_argument("--out", help="checkpoint path (or checkpoint_path)")
    sp.add_argument("--quiet", action="store_true", help="no per-epoch lines")
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("predict", help="score reactions with a checkpoint")
    sp.add_argument("--checkpoint", required=True, help="trained checkpoint")
    sp.add_argument("--threshold", type=float, help="override the stored threshold")
    sp.add_argument("--input", help="file with one reaction per line")
    sp.add_argument("reaction", nargs="*")
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("evaluate", help="metrics on a labeled split")
    sp.add_argument("--checkpoint", required=True, help="trained checkpoint")
    sp.add_argument("--test", required=True, help="labeled split to score")
    sp.add_argument("--threshold", type=float, help="override the stored threshold")
    sp.add_argument("--sweep", action="store_true", help="also sweep thresholds 0.1..1.0")
    sp.add_argument("--roc-out", help="write ROC points as TSV")
    sp.add_argument("--report-dir", help="write metrics.kv/roc.tsv/sweep.tsv here")
    sp.set_defaults(func=cmd_evaluate)

    sp = with_config(sub.add_parser("experiment", help="ablation and incremental grids"))
    sp.add_argument("--name", default="default", help="experiment directory name")
    sp.add_argument("--train", help="labeled training split (or train_path)")
    sp.add_argument("--dev", help="labeled dev split (or dev_path)")
    sp.add_argument("--test", help="labeled test split (or test_path)")
    sp.add_argument("--incremental-pool", help="labeled records mixed in by ratio 0.1..1.0")
    sp.add_argument("--no-ablation", action="store_true", help="skip the four ablation cells")
    sp.add_argument("--out", help="report root (default: reports)")
    sp.set_defaults(func=cmd_experiment)
    return p


def _fail(exc: BaseException, code: int) -> int:
    msg = str(exc).replace("\n", " ").replace("\t", " ")
    print(f"error\t{type(exc).__name__}\t{msg}", file=sys.stderr)
    return code


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "lexicon":
            needed = ("train", "out") if args.action == "build" else ("lexicon",)
            missing = [f"--{k}" for k in needed if not getattr(args, k)]
            if args.action == "apply" and not (args.input or args.reaction):
                missing.append("--input or --reaction")
            if missing:
                raise ConfigError(f"lexicon {args.action} needs {', '.join(missing)}")
        if args.command == "rsd" and not args.reaction and not (args.source and args.target):
            raise ConfigError("rsd needs a reaction or --source and --target")
        return args.func(args)
    except ConfigError as exc:
        return _fail(exc, EXIT_CONFIG)
    except (OSError, EmptyCorpus, TooFewRecords, MalformedReaction, UnbalancedBrackets,
            CheckpointError) as exc:
        return _fail(exc, EXIT_IO)
    except RxnJudgeError as exc:
        return _fail(exc, EXIT_FAIL)


if __name__ == "__main__":
    sys.exit(main())
