"""Siamese BiLSTM classifier written directly in numpy.

Row-vector convention throughout: a batch of inputs is ``(B, T, features)``
and every weight multiplies from the right. LSTM gate blocks are stacked in
the order input, forget, output, candidate along the last axis of ``W_x``,
``W_h`` and ``b``. The two Siamese branches read the same arrays; there is no
copy to keep in sync.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import NonFiniteGradient, ShapeMismatch

PAD = "<PAD>"
UNK = "<UNK>"
BCE_EPS = 1e-7
LOGIT_CLIP = 30.0


class Vocab:
    """Dense token index with ``<PAD>`` at 0 and ``<UNK>`` at 1."""

    def __init__(self, tokens: Sequence[str] = ()):
        self.itos: List[str] = [PAD, UNK]
        self.stoi: Dict[str, int] = {PAD: 0, UNK: 1}
        for tok in tokens:
            self.add(tok)

    def add(self, tok: str) -> int:
        if tok not in self.stoi:
            self.stoi[tok] = len(self.itos)
            self.itos.append(tok)
        return self.stoi[tok]

    @classmethod
    def build(cls, streams: Iterable[Sequence[str]], min_count: int = 1) -> "Vocab":
        counts = Counter(tok for s in streams for tok in s)
        # sorted so the index does not depend on corpus order
        keep = sorted(t for t, c in counts.items() if c >= min_count and t not in (PAD, UNK))
        return cls(keep)

    def __len__(self) -> int:
        return len(self.itos)

    def __contains__(self, tok) -> bool:
        return tok in self.stoi

    def index(self, tok: str) -> int:
        return self.stoi.get(tok, 1)

    def encode(self, tokens: Sequence[str], max_len: int) -> np.ndarray:
        ids = np.zeros(max_len, dtype=np.int64)
        kept = [self.index(t) for t in tokens[:max_len]]
        ids[:len(kept)] = kept
        return ids


@dataclass
class ModelConfig:
    vocab_size: int
    embedding_dim: int = 64
    hidden_dim: int = 128
    max_len: int = 100
    use_rsd: bool = True
    init_range: float = 0.05
    dtype: str = "float32"


def sigmoid(x):
    # tanh form avoids overflow warnings for large |x|
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def init_params(cfg: ModelConfig, rng: np.random.Generator) -> Dict[str, np.ndarray]:
    d, H, V = cfg.embedding_dim, cfg.hidden_dim, cfg.vocab_size
    dt = np.dtype(cfg.dtype)

    def uniform(shape, limit):
        return rng.uniform(-limit, limit, size=shape).astype(dt)

    params = {"embedding": uniform((V, d), cfg.init_range)}
    params["embedding"][0] = 0.0
    lstm_limit = 1.0 / np.sqrt(H)
    for direction in ("fwd", "bwd"):
        params[f"{direction}.W_x"] = uniform((2 * d, 4 * H), lstm_limit)
        params[f"{direction}.W_h"] = uniform((H, 4 * H), lstm_limit)
        b = np.zeros(4 * H, dtype=dt)
        b[H:2 * H] = 1.0  # forget-gate bias
        params[f"{direction}.b"] = b
    params["mlp.W1"] = uniform((4 * H, 2 * H), np.sqrt(6.0 / (6 * H)))
    params["mlp.b1"] = np.zeros(2 * H, dtype=dt)
    params["mlp.w2"] = uniform((2 * H,), np.sqrt(6.0 / (2 * H + 1)))
    params["mlp.b2"] = np.zeros(1, dtype=dt)
    return params


def param_shapes(cfg: ModelConfig) -> Dict[str, Tuple[int, ...]]:
    d, H = cfg.embedding_dim, cfg.hidden_dim
    shapes = {"embedding": (cfg.vocab_size, d)}
    for direction in ("fwd", "bwd"):
        shapes[f"{direction}.W_x"] = (2 * d, 4 * H)
        shapes[f"{direction}.W_h"] = (H, 4 * H)
        shapes[f"{direction}.b"] = (4 * H,)
    shapes.update({"mlp.W1": (4 * H, 2 * H), "mlp.b1": (2 * H,),
                   "mlp.w2": (2 * H,), "mlp.b2": (1,)})
    return shapes


# ---------------------------------------------------------------- LSTM core

def lstm_step(x, h_prev, c_prev, W_x, W_h, b):
    """One LSTM update on row vectors; returns ``(h, c)``."""
    H = h_prev.shape[-1]
    a = x @ W_x + h_prev @ W_h + b
    i = sigmoid(a[..., :H])
    f = sigmoid(a[..., H:2 * H])
    u = sigmoid(a[..., 2 * H:3 * H])
    g = np.tanh(a[..., 3 * H:])
    c = f * c_prev + i * g
    h = np.tanh(c) * u
    return h, c


@dataclass
class _DirCache:
    X: np.ndarray
    mask: np.ndarray
    order: List[int]
    steps: List[tuple] = field(default_factory=list)


def lstm_run(X: np.ndarray, mask: np.ndarray, W_x, W_h, b, reverse: bool = False):
    """Run one direction over ``X (B, T, D)``; masked steps leave the state untouched.

    With a prefix mask the forward pass ends on the last valid position and
    the reverse pass starts there, so the returned state is the final state of
    each direction.
    """
    B, T, _ = X.shape
    H = W_h.shape[0]
    h = np.zeros((B, H), dtype=X.dtype)
    c = np.zeros((B, H), dtype=X.dtype)
    Z = X @ W_x + b
    order = list(range(T - 1, -1, -1)) if reverse else list(range(T))
    cache = _DirCache(X, mask, order)
    for t in order:
        m = mask[:, t, None]
        if not m.any():
            cache.steps.append(None)
            continue
        a = Z[:, t] + h @ W_h
        i = sigmoid(a[:, :H])
        f = sigmoid(a[:, H:2 * H])
        u = sigmoid(a[:, 2 * H:3 * H])
        g = np.tanh(a[:, 3 * H:])
        c_new = f * c + i * g
        tc = np.tanh(c_new)
        h_new = tc * u
        cache.steps.append((h, c, i, f, u, g, tc, m))
        h = np.where(m, h_new, h)
        c = np.where(m, c_new, c)
    return h, cache


def lstm_backward(dh: np.ndarray, cache: _DirCache, W_x, W_h):
    H = W_h.shape[0]
    X = cache.X
    B, T, _ = X.shape
    dZ = np.zeros((B, T, 4 * H), dtype=X.dtype)
    dW_h = np.zeros_like(W_h)
    dc = np.zeros_like(dh)
    for t, step in zip(reversed(cache.order), reversed(cache.steps)):
        if step is None:
            continue
        h_prev, c_prev, i, f, u, g, tc, m = step
        mf = m.astype(X.dtype)
        dh_new = dh * mf
        dc_new = dc * mf + dh_new * u * (1.0 - tc * tc)
        du = dh_new * tc
        da = np.concatenate([dc_new * g * i * (1.0 - i),
                             dc_new * c_prev * f * (1.0 - f),
                             du * u * (1.0 - u),
                             dc_new * i * (1.0 - g * g)], axis=1)
        dZ[:, t] = da
        dW_h += h_prev.T @ da
        dh = da @ W_h.T + dh * (1.0 - mf)
        dc = dc_new * f + dc * (1.0 - mf)
    dW_x = np.einsum("btd,btk->dk", X, dZ)
    db = dZ.sum(axis=(0, 1))
    dX = dZ @ W_x.T
    return dX, dW_x, dW_h, db


# --------------------------------------------------------------- batch data

@dataclass
class Batch:
    """Index-encoded reactions; lengths mark the valid prefix of each branch."""
    seq1: np.ndarray
    seq2: np.ndarray
    rsd: np.ndarray
    len1: np.ndarray
    len2: np.ndarray
    labels: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.seq1)

    def subset(self, idx) -> "Batch":
        return Batch(self.seq1[idx], self.seq2[idx], self.rsd[idx], self.len1[idx],
                     self.len2[idx], None if self.labels is None else self.labels[idx])

    def trimmed(self) -> "Batch":
        """Drop trailing columns that are padding for every row."""
        T = int(max(self.len1.max(initial=0), self.len2.max(initial=0), 1))
        return Batch(self.seq1[:, :T], self.seq2[:, :T], self.rsd[:, :T],
                     self.len1, self.len2, self.labels)

    @staticmethod
    def concat(batches: Sequence["Batch"]) -> "Batch":
        labels = None
        if all(b.labels is not None for b in batches):
            labels = np.concatenate([b.labels for b in batches])
        return Batch(*(np.concatenate([getattr(b, k) for b in batches])
                       for k in ("seq1", "seq2", "rsd", "len1", "len2")), labels=labels)


def _prefix_mask(lengths: np.ndarray, T: int) -> np.ndarray:
    return np.arange(T)[None, :] < lengths[:, None]


# ------------------------------------------------------------------- model

class SiameseBiLSTM:
    def __init__(self, cfg: ModelConfig, params: Optional[Dict[str, np.ndarray]] = None,
                 seed: int = 0):
        self.cfg = cfg
        self.params = params if params is not None else init_params(cfg, np.random.default_rng(seed))
        shapes = param_shapes(cfg)
        for name, shape in shapes.items():
            if self.params[name].shape != shape:
                raise ShapeMismatch(f"{name}: expected {shape}, got {self.params[name].shape}")

    @property
    def dtype(self):
        return self.params["embedding"].dtype

    def astype(self, dtype) -> "SiameseBiLSTM":
        cfg = ModelConfig(**{**self.cfg.__dict__, "dtype": np.dtype(dtype).name})
        return SiameseBiLSTM(cfg, {k: v.astype(dtype) for k, v in self.params.items()})

    def _branch_inputs(self, seq, rsd):
        E = self.params["embedding"]
        rsd_part = E[rsd] if self.cfg.use_rsd else np.zeros(rsd.shape + (E.shape[1],), E.dtype)
        return np.concatenate([E[seq], rsd_part], axis=-1)

    def encode_branch(self, X: np.ndarray, mask: np.ndarray):
        p = self.params
        hf, cf = lstm_run(X, mask, p["fwd.W_x"], p["fwd.W_h"], p["fwd.b"])
        hb, cb = lstm_run(X, mask, p["bwd.W_x"], p["bwd.W_h"], p["bwd.b"], reverse=True)
        return np.concatenate([hf, hb], axis=1), (cf, cb)

    def head(self, z: np.ndarray):
        p = self.params
        a1 = z @ p["mlp.W1"] + p["mlp.b1"]
        h1 = np.tanh(a1)
        logit = h1 @ p["mlp.w2"] + p["mlp.b2"][0]
        return logit, h1

    def forward(self, batch: Batch):
        """Probabilities for a batch plus the cache needed by :meth:`backward`."""
        batch = batch.trimmed()
        T = batch.seq1.shape[1]
        m1 = _prefix_mask(batch.len1, T)
        m2 = _prefix_mask(batch.len2, T)
        X1 = self._branch_inputs(batch.seq1, batch.rsd)
        X2 = self._branch_inputs(batch.seq2, batch.rsd)
        r1, c1 = self.encode_branch(X1, m1)
        r2, c2 = self.encode_branch(X2, m2)
        z = np.concatenate([r1, r2], axis=1)
        logit, h1 = self.head(z)
        # float64 keeps the probability strictly inside (0, 1) for |logit| <= 30
        prob = sigmoid(np.clip(logit.astype(np.float64), -LOGIT_CLIP, LOGIT_CLIP))
        cache = dict(batch=batch, c1=c1, c2=c2, z=z, h1=h1, logit=logit, prob=prob)
        return prob, cache

    def predict_proba(self, batch: Batch, batch_size: int = 256) -> np.ndarray:
        out = []
        for s in range(0, len(batch), batch_size):
            prob, _ = self.forward(batch.subset(slice(s, s + batch_size)))
            out.append(prob)
        return np.concatenate(out) if out else np.zeros(0)

    def loss(self, batch: Batch) -> float:
        prob, _ = self.forward(batch)
        return bce_loss(prob, batch.labels)

    def backward(self, cache, labels: np.ndarray) -> Dict[str, np.ndarray]:
        """Exact gradients of the mean BCE loss for the cached forward pass."""
        p = self.params
        batch: Batch = cache["batch"]
        prob, logit = cache["prob"], cache["logit"]
        y = labels.astype(np.float64)
        n = len(y)
        # the clamp and the logit clip both have zero slope where they bind
        live = (prob > BCE_EPS) & (prob < 1.0 - BCE_EPS) & (np.abs(logit) < LOGIT_CLIP)
        dlogit = np.where(live, (prob - y) / n, 0.0).astype(self.dtype)

        grads = {k: np.zeros_like(v) for k, v in p.items()}
        h1, z = cache["h1"], cache["z"]
        grads["mlp.w2"] = h1.T @ dlogit
        grads["mlp.b2"] = np.array([dlogit.sum()], dtype=self.dtype)
        da1 = np.outer(dlogit, p["mlp.w2"]) * (1.0 - h1 * h1)
        grads["mlp.W1"] = z.T @ da1
        grads["mlp.b1"] = da1.sum(axis=0)
        dz = da1 @ p["mlp.W1"].T

        H = self.cfg.hidden_dim
        d = self.cfg.embedding_dim
        dE = grads["embedding"]
        branches = ((dz[:, :2 * H], cache["c1"], batch.seq1), (dz[:, 2 * H:], cache["c2"], batch.seq2))
        for dr, (cf, cb), seq in branches:
            dX = np.zeros_like(cf.X)
            for direction, dh, c in (("fwd", dr[:, :H], cf), ("bwd", dr[:, H:], cb)):
                dXd, dWx, dWh, db = lstm_backward(dh, c, p[f"{direction}.W_x"], p[f"{direction}.W_h"])
                dX += dXd
                grads[f"{direction}.W_x"] += dWx
                grads[f"{direction}.W_h"] += dWh
                grads[f"{direction}.b"] += db
            np.add.at(dE, seq, dX[..., :d])
            if self.cfg.use_rsd:
                np.add.at(dE, batch.rsd, dX[..., d:])
        dE[0] = 0.0
        for name, g in grads.items():
            if not np.all(np.isfinite(g)):
                raise NonFiniteGradient(f"non-finite gradient in {name}")
        return grads


def bce_loss(y_hat, y) -> float:
    """Mean binary cross-entropy with predictions clamped to ``[eps, 1-eps]``."""
    y_hat = np.clip(np.asarray(y_hat, dtype=np.float64), BCE_EPS, 1.0 - BCE_EPS)
    y = np.asarray(y, dtype=np.float64)
    return float(-np.mean(y * np.log(y_hat) + (1.0 - y) * np.log(1.0 - y_hat)))


# ------------------------------------------------- single-example interface

@dataclass
class BranchInput:
    """Fused ``(2d, h)`` input for one branch and its valid-position mask."""
    x: np.ndarray
    mask: np.ndarray

    @property
    def length(self) -> int:
        return int(self.mask.sum())


@dataclass(frozen=True)
class Prediction:
    probability: float
    label: int


def embed(tokens: Sequence[str], vocab: Vocab, E: np.ndarray, max_len: int = 100) -> np.ndarray:
    """Look up a token sequence as a ``(d, max_len)`` matrix, zero-padded at the tail."""
    return E[vocab.encode(tokens, max_len)].T


def fuse(seq_emb: np.ndarray, rsd_emb: np.ndarray, use_rsd: bool = True,
         seq_len: Optional[int] = None, rsd_len: Optional[int] = None) -> BranchInput:
    """Stack a sequence embedding on top of the RSD embedding position by position.

    The mask covers the longer of the two streams. Without explicit lengths a
    column counts as valid when it is not all zeros.
    """
    if seq_emb.shape != rsd_emb.shape:
        raise ShapeMismatch(f"{seq_emb.shape} vs {rsd_emb.shape}")
    if not use_rsd:
        rsd_emb = np.zeros_like(rsd_emb)
    h = seq_emb.shape[1]
    if seq_len is None:
        seq_len = _nonzero_prefix(seq_emb)
    if rsd_len is None:
        rsd_len = _nonzero_prefix(rsd_emb)
    mask = np.arange(h) < max(seq_len, rsd_len if use_rsd else 0, 0)
    return BranchInput(np.concatenate([seq_emb, rsd_emb], axis=0), mask)


def _nonzero_prefix(emb: np.ndarray) -> int:
    nz = np.flatnonzero(np.any(emb != 0, axis=0))
    return int(nz[-1]) + 1 if nz.size else 0


def bilstm(inp: BranchInput, params: Dict[str, np.ndarray]) -> np.ndarray:
    """Final forward state concatenated with final backward state, shape ``(2H,)``."""
    X = inp.x.T[None]
    mask = inp.mask[None]
    hf, _ = lstm_run(X, mask, params["fwd.W_x"], params["fwd.W_h"], params["fwd.b"])
    hb, _ = lstm_run(X, mask, params["bwd.W_x"], params["bwd.W_h"], params["bwd.b"], reverse=True)
    return np.concatenate([hf[0], hb[0]])


def forward(M1: BranchInput, M2: BranchInput, params: Dict[str, np.ndarray],
            threshold: float = 0.5) -> Prediction:
    z = np.concatenate([bilstm(M1, params), bilstm(M2, params)])
    h1 = np.tanh(z @ params["mlp.W1"] + params["mlp.b1"])
    logit = float(h1 @ params["mlp.w2"] + params["mlp.b2"][0])
    prob = float(sigmoid(np.clip(logit, -LOGIT_CLIP, LOGIT_CLIP)))
    return Prediction(prob, int(prob >= threshold))
