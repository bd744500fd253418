"""Reaction -> model inputs, and the bundled artifact used for prediction."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .dlg import Corpus, Lexicon, segment, segment_dp
from .neural import checkpoint
from .neural.model import Batch, ModelConfig, Prediction, SiameseBiLSTM, Vocab
from .rsd import generate_rsd, rsd_tokens
from .smiles_text import RawReaction, normalize_reaction, parse_reaction, tokenize_group


@dataclass(frozen=True)
class Features:
    reactant: List[str]
    product: List[str]
    rsd: List[str]

    def streams(self):
        return (self.reactant, self.product, self.rsd)


def side_streams(r: RawReaction):
    """Atom-wise token streams of the reactant and product groups (reagents dropped)."""
    return tokenize_group(r.reactants), tokenize_group(r.products)


def lexicon_corpus(reactions: Iterable[RawReaction]) -> Corpus:
    streams = []
    for r in reactions:
        streams.extend(side_streams(r))
    return Corpus([s for s in streams if s])


SEGMENTERS = {"greedy": segment, "dp": segment_dp}


def featurize(r: RawReaction, lexicon: Optional[Lexicon] = None,
              segmenter: str = "greedy") -> Features:
    """DLG words for both sides and RSD tokens aligned on atom-wise tokens.

    Without a lexicon the sides stay atom-wise, which is the tokenization
    ablation.
    """
    src, tgt = side_streams(r)
    tags = rsd_tokens(generate_rsd(src, tgt))
    if lexicon is not None:
        seg = SEGMENTERS[segmenter]
        src_words = seg(src, lexicon).words
        tgt_words = seg(tgt, lexicon).words
    else:
        src_words, tgt_words = src, tgt
    return Features(src_words, tgt_words, tags)


def encode(features: Sequence[Features], vocab: Vocab, max_len: int, use_rsd: bool = True,
           labels: Optional[Sequence[int]] = None) -> Batch:
    n = len(features)
    seq1 = np.zeros((n, max_len), dtype=np.int64)
    seq2 = np.zeros((n, max_len), dtype=np.int64)
    rsd = np.zeros((n, max_len), dtype=np.int64)
    len1 = np.zeros(n, dtype=np.int64)
    len2 = np.zeros(n, dtype=np.int64)
    for k, f in enumerate(features):
        seq1[k] = vocab.encode(f.reactant, max_len)
        seq2[k] = vocab.encode(f.product, max_len)
        rsd[k] = vocab.encode(f.rsd, max_len)
        r_len = min(len(f.rsd), max_len) if use_rsd else 0
        len1[k] = max(min(len(f.reactant), max_len), r_len)
        len2[k] = max(min(len(f.product), max_len), r_len)
    y = None if labels is None else np.asarray(labels, dtype=np.int64)
    return Batch(seq1, seq2, rsd, len1, len2, y)


def build_vocab(features: Iterable[Features], min_count: int = 1) -> Vocab:
    return Vocab.build((s for f in features for s in f.streams()), min_count=min_count)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


class Artifacts:
    """Everything ``predict`` needs: lexicon, vocab, weights and settings."""

    def __init__(self, model: SiameseBiLSTM, vocab: Vocab, lexicon: Optional[Lexicon],
                 threshold: float = 0.5, extra: Optional[dict] = None,
                 segmenter: str = "greedy"):
        self.model = model
        self.segmenter = segmenter
        self.vocab = vocab
        self.lexicon = lexicon
        self.threshold = threshold
        self.extra = dict(extra or {})

    @property
    def max_len(self) -> int:
        return self.model.cfg.max_len

    def featurize(self, r: RawReaction) -> Features:
        return featurize(r, self.lexicon, self.segmenter)

    def encode(self, reactions: Sequence[RawReaction], labels=None) -> Batch:
        feats = [self.featurize(r) for r in reactions]
        return encode(feats, self.vocab, self.max_len, self.model.cfg.use_rsd, labels)

    def predict_proba(self, reactions: Sequence[RawReaction]) -> np.ndarray:
        if not reactions:
            return np.zeros(0)
        return self.model.predict_proba(self.encode(reactions))

    def predict(self, reaction, threshold: Optional[float] = None) -> Prediction:
        if isinstance(reaction, str):
            reaction = parse_reaction(reaction)
        reaction = normalize_reaction(reaction)
        t = self.threshold if threshold is None else threshold
        p = float(self.predict_proba([reaction])[0])
        return Prediction(p, int(p >= t))

    def metadata(self) -> dict:
        cfg = self.model.cfg
        meta = {
            "format": "rxnjudge-checkpoint",
            "vocab": list(self.vocab.itos),
            "embedding_dim": cfg.embedding_dim,
            "hidden_dim": cfg.hidden_dim,
            "max_len": cfg.max_len,
            "use_rsd": cfg.use_rsd,
            "use_dlg": self.lexicon is not None,
            "threshold": self.threshold,
            "segmenter": self.segmenter,
            "lexicon": None if self.lexicon is None else
                [[" ".join(w), g] for w, g in self.lexicon.ranked()],
        }
        meta.update(self.extra)
        return meta

    def save(self, path) -> None:
        checkpoint.save(path, self.model.params, self.metadata())

    @classmethod
    def load(cls, path) -> "Artifacts":
        params, meta = checkpoint.load(path)
        vocab = Vocab(meta["vocab"][2:])
        if vocab.itos != meta["vocab"]:
            raise checkpoint.CheckpointError("vocab listing does not start with <PAD>, <UNK>")
        cfg = ModelConfig(vocab_size=len(vocab), embedding_dim=meta["embedding_dim"],
                          hidden_dim=meta["hidden_dim"], max_len=meta["max_len"],
                          use_rsd=meta["use_rsd"], dtype="float32")
        lexicon = None
        if meta.get("lexicon") is not None:
            lexicon = Lexicon({tuple(w.split(" ")): float(g) for w, g in meta["lexicon"]})
        known = {"format", "vocab", "embedding_dim", "hidden_dim", "max_len", "use_rsd",
                 "use_dlg", "threshold", "segmenter", "lexicon"}
        extra = {k: v for k, v in meta.items() if k not in known}
        return cls(SiameseBiLSTM(cfg, params), vocab, lexicon, meta.get("threshold", 0.5), extra,
                   meta.get("segmenter", "greedy"))
