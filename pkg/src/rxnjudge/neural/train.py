"""Minibatch training with Adam, global-norm clipping and best-dev selection."""
from __future__ import annotations

import copy
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from ..errors import DivergedTraining
from .model import Batch, SiameseBiLSTM, bce_loss

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    epochs: int = 30
    batch_size: int = 128
    learning_rate: float = 1e-3
    clip_norm: float = 5.0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    threshold: float = 0.5


class Adam:
    def __init__(self, params: Dict[str, np.ndarray], lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        scale = self.lr * math.sqrt(1 - b2 ** self.t) / (1 - b1 ** self.t)
        for k, g in grads.items():
            m, v = self.m[k], self.v[k]
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            params[k] -= (scale * m / (np.sqrt(v) + self.eps)).astype(params[k].dtype)


def clip_global_norm(grads: Dict[str, np.ndarray], max_norm: float) -> float:
    norm = math.sqrt(sum(float(np.sum(g.astype(np.float64) ** 2)) for g in grads.values()))
    if max_norm > 0 and norm > max_norm:
        s = max_norm / (norm + 1e-12)
        for g in grads.values():
            g *= s
    return norm


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    train_accuracy: float
    dev_loss: Optional[float] = None
    dev_accuracy: Optional[float] = None


@dataclass
class TrainResult:
    model: SiameseBiLSTM
    history: List[EpochStats] = field(default_factory=list)
    best_epoch: int = 0


def evaluate_loss(model: SiameseBiLSTM, data: Batch, threshold: float = 0.5):
    prob = model.predict_proba(data)
    acc = float(np.mean((prob >= threshold).astype(int) == data.labels)) if len(data) else 0.0
    return bce_loss(prob, data.labels), acc


def train(model: SiameseBiLSTM, data: Batch, cfg: TrainConfig, dev: Optional[Batch] = None,
          progress=None) -> TrainResult:
    """Train in place and return the best-dev parameters and per-epoch history.

    Without a dev set the final epoch is kept.
    """
    rng = np.random.default_rng(cfg.seed)
    opt = Adam(model.params, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps)
    result = TrainResult(model)
    best_dev = math.inf
    best_params = None
    y = data.labels
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(data))
        loss_sum = 0.0
        correct = 0
        for s in range(0, len(order), cfg.batch_size):
            idx = order[s:s + cfg.batch_size]
            batch = data.subset(idx)
            prob, cache = model.forward(batch)
            loss_sum += bce_loss(prob, batch.labels) * len(idx)
            correct += int(np.sum((prob >= cfg.threshold).astype(int) == batch.labels))
            grads = model.backward(cache, batch.labels)
            clip_global_norm(grads, cfg.clip_norm)
            opt.step(model.params, grads)
        stats = EpochStats(epoch, loss_sum / len(y), correct / len(y))
        if dev is not None and len(dev):
            stats.dev_loss, stats.dev_accuracy = evaluate_loss(model, dev, cfg.threshold)
            if not math.isfinite(stats.dev_loss):
                raise DivergedTraining(f"dev loss is {stats.dev_loss} at epoch {epoch}")
            if stats.dev_loss < best_dev:
                best_dev = stats.dev_loss
                best_params = copy.deepcopy(model.params)
                result.best_epoch = epoch
        result.history.append(stats)
        log.info("epoch %d train_loss=%.4f train_acc=%.4f dev_loss=%s dev_acc=%s", epoch,
                 stats.train_loss, stats.train_accuracy, stats.dev_loss, stats.dev_accuracy)
        if progress is not None:
            progress(stats)
    if best_params is not None:
        model.params.update(best_params)
    else:
        result.best_epoch = cfg.epochs
    return result
