"""Unsupervised word induction with Description Length Gain (DLG).

Token sequences are flattened into one symbol stream with a reserved boundary
symbol between sequences. A candidate n-gram is scored by how many bits the
stream saves when every non-overlapping occurrence is replaced by one fresh
symbol and a single spelled-out copy of the candidate is appended.
"""
from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .errors import CandidateAbsent, EmptyCorpus

log = logging.getLogger(__name__)

BOUNDARY = "\x00"
Word = Tuple[str, ...]


def _xlog2x(c: float) -> float:
    return c * math.log2(c) if c > 0 else 0.0


def description_length(freq: Mapping[str, int], total: int) -> float:
    """Empirical code length of a corpus in bits: ``-N * sum p log2 p``."""
    if total <= 0:
        raise EmptyCorpus("description length of an empty corpus")
    # N log N - sum c log c is the same quantity with fewer roundings
    return max(0.0, _xlog2x(total) - sum(_xlog2x(c) for c in freq.values()))


@dataclass
class Corpus:
    sequences: List[List[str]]
    stream: List[str] = field(init=False, repr=False)
    freq: Counter = field(init=False, repr=False)

    def __post_init__(self):
        self.sequences = [list(s) for s in self.sequences]
        stream: List[str] = []
        for k, seq in enumerate(self.sequences):
            if k:
                stream.append(BOUNDARY)
            stream.extend(seq)
        self.stream = stream
        self.freq = Counter(stream)
        self._baseline = None
        self._sum_xlogx = sum(_xlog2x(c) for c in self.freq.values())

    @property
    def total_length(self) -> int:
        return len(self.stream)

    @property
    def vocabulary(self) -> List[str]:
        return sorted(s for s in self.freq if s != BOUNDARY)

    def baseline_length(self) -> float:
        if self._baseline is None:
            self._baseline = description_length(self.freq, self.total_length)
        return self._baseline


def count_nonoverlapping(stream: Sequence[str], candidate: Sequence[str]) -> int:
    k = len(candidate)
    cand = list(candidate)
    i = 0
    n = 0
    limit = len(stream) - k
    while i <= limit:
        if stream[i:i + k] == cand:
            n += 1
            i += k
        else:
            i += 1
    return n


def _dlg_from_counts(corpus: Corpus, candidate: Sequence[str], occurrences: int) -> float:
    total = corpus.total_length
    k = len(candidate)
    new_total = total - occurrences * k + occurrences + k
    inner = Counter(candidate)
    # only the candidate's symbols and the fresh symbol change counts
    sum_old = corpus._sum_xlogx
    delta = 0.0
    for sym, mult in inner.items():
        c = corpus.freq.get(sym, 0)
        delta += _xlog2x(c - occurrences * mult + mult) - _xlog2x(c)
    delta += _xlog2x(occurrences)
    new_length = max(0.0, _xlog2x(new_total) - (sum_old + delta))
    return corpus.baseline_length() - new_length


def dlg_score(corpus: Corpus, candidate: Sequence[str]) -> float:
    """DLG of ``candidate`` in bits; positive means the n-gram compresses."""
    if corpus.total_length == 0:
        raise EmptyCorpus("cannot score against an empty corpus")
    occ = count_nonoverlapping(corpus.stream, candidate)
    if occ == 0:
        raise CandidateAbsent(f"candidate {' '.join(candidate)!r} never occurs")
    return _dlg_from_counts(corpus, candidate, occ)


@dataclass
class Lexicon:
    entries: Dict[Word, float]
    max_word_len: int = 1

    def __post_init__(self):
        if self.entries:
            self.max_word_len = max(self.max_word_len, max(len(w) for w in self.entries))

    def __contains__(self, word) -> bool:
        return tuple(word) in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def score(self, word: Sequence[str]) -> float:
        return self.entries.get(tuple(word), 0.0)

    def multi_token_words(self) -> Dict[Word, float]:
        return {w: g for w, g in self.entries.items() if len(w) > 1}

    def ranked(self) -> List[Tuple[Word, float]]:
        return sorted(self.entries.items(), key=lambda kv: (-kv[1], kv[0]))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for word, g in self.ranked():
                fh.write(f"{' '.join(word)}\t{g!r}\n")

    @classmethod
    def load(cls, path) -> "Lexicon":
        entries = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    word, g = line.split("\t")
                    entries[tuple(word.split(" "))] = float(g)
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: bad lexicon line {line!r}") from exc
        return cls(entries)


def ngram_counts(corpus: Corpus, max_n: int) -> Dict[Word, int]:
    """Non-overlapping left-to-right occurrence counts of all 2..max_n grams."""
    counts: Dict[Word, int] = {}
    last_end: Dict[Word, int] = {}
    stream = corpus.stream
    n_sym = len(stream)
    for i in range(n_sym):
        if stream[i] == BOUNDARY:
            continue
        for n in range(2, max_n + 1):
            j = i + n
            if j > n_sym or stream[j - 1] == BOUNDARY:
                break
            gram = tuple(stream[i:j])
            if last_end.get(gram, -1) <= i:
                counts[gram] = counts.get(gram, 0) + 1
                last_end[gram] = j
    return counts


def build_lexicon(corpus: Corpus, max_n: int = 8, threshold: float = 0.0,
                  min_count: int = 3, fallback_score: float = 0.0) -> Lexicon:
    """Keep every n-gram (2 <= n <= max_n) whose DLG exceeds ``threshold``.

    All single tokens of the corpus are added with ``fallback_score`` so that
    segmentation can always make progress.
    """
    if corpus.total_length == 0 or not corpus.vocabulary:
        raise EmptyCorpus("cannot build a lexicon from an empty corpus")
    if max_n < 2:
        raise ValueError("max_n must be at least 2")
    entries: Dict[Word, float] = {}
    counts = ngram_counts(corpus, max_n)
    for gram, occ in counts.items():
        if occ < min_count:
            continue
        g = _dlg_from_counts(corpus, gram, occ)
        if g > threshold:
            entries[gram] = g
    log.info("lexicon: %d candidates, %d kept", len(counts), len(entries))
    for sym in corpus.vocabulary:
        entries[(sym,)] = fallback_score
    return Lexicon(entries, max_word_len=max_n)


@dataclass(frozen=True)
class Segmentation:
    segments: Tuple[Word, ...]
    total_goodness: float

    @property
    def words(self) -> List[str]:
        return ["".join(w) for w in self.segments]


def segment(seq: Sequence[str], lex: Lexicon) -> Segmentation:
    """Greedy left-to-right maximal matching on goodness.

    At each position the matching lexicon word with the highest score wins;
    ties go to the longer word, then to the lexicographically smaller one.
    Tokens absent from the lexicon are emitted alone with score 0.
    """
    seq = tuple(seq)
    segments: List[Word] = []
    total = 0.0
    i = 0
    n = len(seq)
    while i < n:
        best = (seq[i],)
        best_g = lex.entries.get(best, 0.0)
        for k in range(2, min(lex.max_word_len, n - i) + 1):
            w = seq[i:i + k]
            g = lex.entries.get(w)
            if g is None:
                continue
            if g > best_g or (g == best_g and (k > len(best) or (k == len(best) and w < best))):
                best, best_g = w, g
        segments.append(best)
        total += best_g
        i += len(best)
    return Segmentation(tuple(segments), total)


def segment_dp(seq: Sequence[str], lex: Lexicon) -> Segmentation:
    """Segmentation maximizing the summed goodness over the whole sequence.

    Among equally good segmentations the one with fewer segments wins.
    """
    seq = tuple(seq)
    n = len(seq)
    best: List[Tuple[float, int]] = [(0.0, 0)] + [(-math.inf, 0)] * n
    back = [0] * (n + 1)
    for j in range(1, n + 1):
        for k in range(1, min(lex.max_word_len, j) + 1):
            w = seq[j - k:j]
            if k == 1:
                g = lex.entries.get(w, 0.0)
            elif w in lex.entries:
                g = lex.entries[w]
            else:
                continue
            prev_score, prev_count = best[j - k]
            cand = (prev_score + g, prev_count + 1)
            if cand[0] > best[j][0] or (cand[0] == best[j][0] and cand[1] < best[j][1]):
                best[j] = cand
                back[j] = k
    segments: List[Word] = []
    j = n
    while j > 0:
        k = back[j]
        segments.append(seq[j - k:j])
        j -= k
    segments.reverse()
    return Segmentation(tuple(segments), sum(lex.entries.get(w, 0.0) for w in segments))


def corpus_from_streams(streams: Iterable[Sequence[str]]) -> Corpus:
    return Corpus([list(s) for s in streams if len(s)])
