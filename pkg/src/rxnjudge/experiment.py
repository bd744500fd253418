"""Fit/evaluate helpers and the ablation + incremental experiment grids."""
from __future__ import annotations

import json
import logging
import traceback
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .config import Config
from .datasets import LabeledReaction, incremental_mix
from .dlg import Lexicon, build_lexicon
from .evaluation import EvalReport, SweepResult, full_report, threshold_sweep, write_report
from .neural.model import ModelConfig, SiameseBiLSTM
from .neural.train import TrainConfig, TrainResult, train
from .pipeline import Artifacts, build_vocab, encode, featurize, lexicon_corpus

log = logging.getLogger(__name__)

ABLATION_CELLS = {
    "full": dict(use_rsd=True, use_dlg=True),
    "no_rsd": dict(use_rsd=False, use_dlg=True),
    "no_dlg": dict(use_rsd=True, use_dlg=False),
    "no_rsd_no_dlg": dict(use_rsd=False, use_dlg=False),
}
INCREMENTAL_RATIOS = tuple(round(0.1 * k, 1) for k in range(1, 11))


def fit(train_records: Sequence[LabeledReaction], dev_records: Sequence[LabeledReaction],
        cfg: Config, lexicon: Optional[Lexicon] = None,
        progress=None) -> Tuple[Artifacts, TrainResult]:
    """Build lexicon (unless given) and vocab from the training records only, then train."""
    reactions = [r.reaction for r in train_records]
    if not cfg.use_dlg:
        lexicon = None
    elif lexicon is None:
        lexicon = build_lexicon(lexicon_corpus(reactions), cfg.lexicon_max_n,
                                cfg.lexicon_threshold, cfg.lexicon_min_count)
    feats = [featurize(r, lexicon, cfg.segmenter) for r in reactions]
    vocab = build_vocab(feats, cfg.vocab_min_count)
    mcfg = ModelConfig(vocab_size=len(vocab), embedding_dim=cfg.embedding_dim,
                       hidden_dim=cfg.hidden_dim, max_len=cfg.max_len, use_rsd=cfg.use_rsd)
    model = SiameseBiLSTM(mcfg, seed=cfg.seed)
    data = encode(feats, vocab, cfg.max_len, cfg.use_rsd, [r.label for r in train_records])
    artifacts = Artifacts(model, vocab, lexicon, cfg.threshold, segmenter=cfg.segmenter)
    dev = artifacts.encode([r.reaction for r in dev_records], [r.label for r in dev_records]) \
        if dev_records else None
    tcfg = TrainConfig(epochs=cfg.epochs, batch_size=cfg.batch_size,
                       learning_rate=cfg.learning_rate, clip_norm=cfg.clip_norm,
                       seed=cfg.seed, threshold=cfg.threshold)
    result = train(model, data, tcfg, dev, progress=progress)
    artifacts.extra["config"] = cfg.echo()
    artifacts.extra["history"] = [h.__dict__ for h in result.history]
    artifacts.extra["best_epoch"] = result.best_epoch
    return artifacts, result


def score(artifacts: Artifacts, records: Sequence[LabeledReaction]) -> List[Tuple[float, int]]:
    probs = artifacts.predict_proba([r.reaction for r in records])
    return [(float(p), int(r.label)) for p, r in zip(probs, records)]


def assess(artifacts: Artifacts, records: Sequence[LabeledReaction],
           threshold: Optional[float] = None) -> Tuple[EvalReport, SweepResult]:
    preds = score(artifacts, records)
    t = artifacts.threshold if threshold is None else threshold
    return full_report(preds, t), threshold_sweep(preds)


def majority_baseline(records: Sequence[LabeledReaction]) -> float:
    pos = sum(r.label for r in records)
    return max(pos, len(records) - pos) / len(records) if records else 0.0


@dataclass
class ExperimentPlan:
    name: str
    out_dir: str
    train: List[LabeledReaction]
    dev: List[LabeledReaction]
    test: List[LabeledReaction]
    config: Config
    ablation: bool = True
    incremental_pool: List[LabeledReaction] = field(default_factory=list)
    ratios: Sequence[float] = INCREMENTAL_RATIOS

    def cells(self) -> List[Tuple[str, Config, List[LabeledReaction]]]:
        out = []
        if self.ablation:
            for cell, flags in ABLATION_CELLS.items():
                out.append((f"ablation-{cell}", replace(self.config, **flags), self.train))
        if self.incremental_pool:
            for ratio in self.ratios:
                mixed = incremental_mix(self.train, self.incremental_pool, ratio)
                out.append((f"incremental-{ratio:.1f}", self.config, mixed))
        return out


def run_experiment(plan: ExperimentPlan) -> dict:
    """Train and evaluate every cell; a failing cell is recorded and skipped.

    Writes ``<out_dir>/<name>/<cell>/metrics.kv`` (+ ``roc.tsv``, ``sweep.tsv``)
    and a ``manifest.json`` listing every cell.
    """
    root = Path(plan.out_dir) / plan.name
    root.mkdir(parents=True, exist_ok=True)
    manifest = {"experiment": plan.name, "cells": {}}
    for cell, cfg, train_records in plan.cells():
        entry: Dict[str, object] = {"train_size": len(train_records),
                                    "use_rsd": cfg.use_rsd, "use_dlg": cfg.use_dlg}
        try:
            artifacts, result = fit(train_records, plan.dev, cfg)
            report, sweep = assess(artifacts, plan.test)
            entry["files"] = write_report(root / cell, report, sweep)
            entry["accuracy"] = report.accuracy
            entry["auc"] = report.auc
            entry["best_epoch"] = result.best_epoch
            entry["status"] = "ok"
        except Exception as exc:  # one bad cell must not sink the grid
            log.error("cell %s failed: %s", cell, exc)
            entry["status"] = "error"
            entry["error"] = f"{type(exc).__name__}: {exc}"
            entry["traceback"] = traceback.format_exc(limit=5)
        manifest["cells"][cell] = entry
    (root / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True),
                                        encoding="utf-8")
    return manifest
