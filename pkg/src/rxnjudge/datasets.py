"""Labeled reaction corpora: loading, deduplication, splits and negative generation."""
from __future__ import annotations

import logging
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import islice
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from .errors import MalformedReaction, TooFewRecords, UnbalancedBrackets
from .smiles_text import RawReaction, normalize_reaction, parse_reaction, tokenize_atomwise

log = logging.getLogger(__name__)

CORPUS = "corpus"
RULE_GENERATED = "rule_generated"
REAL_FAILED = "real_failed"
SOURCES = (CORPUS, RULE_GENERATED, REAL_FAILED)
LABEL_MODES = ("column", "positive", "negative")


@dataclass(frozen=True)
class LabeledReaction:
    reaction: RawReaction
    label: int
    source: str = CORPUS

    @property
    def key(self) -> str:
        return self.reaction.render()

    def to_line(self) -> str:
        return f"{self.label}\t{self.key}"


@dataclass
class LoadResult:
    records: List[LabeledReaction]
    malformed: List[Tuple[int, str]] = field(default_factory=list)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


def parse_line(line: str, label_mode: str = "column", source: str = CORPUS) -> LabeledReaction:
    line = line.rstrip("\r\n")
    if label_mode == "column":
        if "\t" not in line:
            raise MalformedReaction(f"missing label column: {line!r}")
        label_text, text = line.split("\t", 1)
        if label_text not in ("0", "1"):
            raise MalformedReaction(f"label must be 0 or 1, got {label_text!r}")
        label = int(label_text)
    elif label_mode in ("positive", "negative"):
        text = line.split("\t")[-1]
        label = 1 if label_mode == "positive" else 0
    else:
        raise ValueError(f"unknown label mode {label_mode!r}; expected one of {LABEL_MODES}")
    return LabeledReaction(normalize_reaction(parse_reaction(text)), label, source)


def load_corpus(path, label_mode: str = "column", source: str = CORPUS) -> LoadResult:
    """Read one reaction per line; malformed lines are counted and skipped.

    ``label_mode`` is ``column`` for ``label<TAB>reaction`` lines, or
    ``positive``/``negative`` to assign a fixed label to bare reactions.
    """
    if label_mode not in LABEL_MODES:
        raise ValueError(f"unknown label mode {label_mode!r}; expected one of {LABEL_MODES}")
    result = LoadResult([])
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                result.records.append(parse_line(line, label_mode, source))
            except (MalformedReaction, UnbalancedBrackets) as exc:
                result.malformed.append((lineno, str(exc)))
    if result.malformed:
        log.warning("%s: skipped %d malformed line(s)", path, len(result.malformed))
    return result


def write_records(path, records: Iterable[LabeledReaction]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(rec.to_line() + "\n")
            n += 1
    return n


def deduplicate(records: Iterable[LabeledReaction]) -> List[LabeledReaction]:
    """Keep the first record per normalized reaction; on a label clash keep the negative."""
    kept: Dict[str, LabeledReaction] = {}
    conflicts = 0
    for rec in records:
        prev = kept.get(rec.key)
        if prev is None:
            kept[rec.key] = rec
        elif prev.label != rec.label:
            conflicts += 1
            log.warning("label conflict for %s; keeping the negative record", rec.key)
            if rec.label == 0:
                kept[rec.key] = rec
    if conflicts:
        log.warning("%d label conflict(s) resolved in favour of negatives", conflicts)
    return list(kept.values())


@dataclass
class DatasetSplit:
    train: List[LabeledReaction]
    dev: List[LabeledReaction]
    test: List[LabeledReaction]
    seed: int = 0

    def counts(self) -> Dict[str, Dict[str, int]]:
        out = {}
        for name in ("train", "dev", "test"):
            part = getattr(self, name)
            pos = sum(r.label for r in part)
            out[name] = {"positive": pos, "negative": len(part) - pos}
        return out


def split(records: Sequence[LabeledReaction], seed: int = 0, test_fraction: float = 0.1,
          dev_fraction: float = 0.1) -> DatasetSplit:
    """Stratified 9:1 train+dev/test split, then 10% of train+dev held out as dev."""
    strata: Dict[int, List[LabeledReaction]] = defaultdict(list)
    for rec in records:
        strata[rec.label].append(rec)
    rng = random.Random(seed)
    train, dev, test = [], [], []
    for label in sorted(strata):
        items = sorted(strata[label], key=lambda r: r.key)
        if len(items) < 3:
            raise TooFewRecords(f"label {label} has only {len(items)} record(s)")
        rng.shuffle(items)
        n_test = int(round(len(items) * test_fraction))
        rest = items[n_test:]
        n_dev = int(round(len(rest) * dev_fraction))
        test.extend(items[:n_test])
        dev.extend(rest[:n_dev])
        train.extend(rest[n_dev:])
    for part in (train, dev, test):
        rng.shuffle(part)
    return DatasetSplit(train, dev, test, seed)


# ------------------------------------------------------------ negative rules

def first_atom_token(molecule: str) -> str:
    toks = tokenize_atomwise(molecule)
    return toks[0] if toks else ""


class ReactantSwap:
    """Replace one reactant with another corpus reactant sharing its first segment."""

    name = "reactant_swap"

    def __init__(self, first_segment: Callable[[str], str] = first_atom_token):
        self.first_segment = first_segment
        self.pool: Dict[str, List[str]] = {}

    def prepare(self, positives: Sequence[RawReaction]) -> None:
        groups: Dict[str, Set[str]] = defaultdict(set)
        for r in positives:
            for mol in r.reactants:
                groups[self.first_segment(mol)].add(mol)
        self.pool = {k: sorted(v) for k, v in groups.items()}

    def candidates(self, r: RawReaction) -> Iterator[RawReaction]:
        for pos, mol in enumerate(r.reactants):
            for other in self.pool.get(self.first_segment(mol), ()):
                if other == mol or other in r.reactants:
                    continue
                swapped = r.reactants[:pos] + (other,) + r.reactants[pos + 1:]
                yield RawReaction(swapped, r.reagents, r.products)


class ReactantDrop:
    """Remove one reactant while keeping the product."""

    name = "reactant_drop"

    def prepare(self, positives) -> None:
        pass

    def candidates(self, r: RawReaction) -> Iterator[RawReaction]:
        if len(r.reactants) < 2:
            return
        for pos in range(len(r.reactants)):
            yield RawReaction(r.reactants[:pos] + r.reactants[pos + 1:], r.reagents, r.products)


@dataclass(frozen=True)
class TokenRule:
    """Rewrite a token pattern inside one reactant; ``*`` matches any single token.

    Wildcards on the right-hand side are filled with the matched tokens in order.
    """
    lhs: Tuple[str, ...]
    rhs: Tuple[str, ...]

    name = "token_rule"

    def __post_init__(self):
        if not self.lhs:
            raise ValueError("rule pattern must not be empty")
        if self.rhs.count("*") > self.lhs.count("*"):
            raise ValueError("rewrite uses more wildcards than the pattern binds")

    def prepare(self, positives) -> None:
        pass

    def rewrite(self, tokens: Sequence[str]) -> Iterator[List[str]]:
        k = len(self.lhs)
        for i in range(len(tokens) - k + 1):
            window = tokens[i:i + k]
            if all(p == "*" or p == t for p, t in zip(self.lhs, window)):
                bound = iter([t for p, t in zip(self.lhs, window) if p == "*"])
                repl = [next(bound) if p == "*" else p for p in self.rhs]
                yield list(tokens[:i]) + repl + list(tokens[i + k:])

    def candidates(self, r: RawReaction) -> Iterator[RawReaction]:
        for pos, mol in enumerate(r.reactants):
            for new in self.rewrite(tokenize_atomwise(mol)):
                text = "".join(new)
                if text and text != mol:
                    yield RawReaction(r.reactants[:pos] + (text,) + r.reactants[pos + 1:],
                                      r.reagents, r.products)


def load_rules(path) -> List[TokenRule]:
    rules = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            try:
                lhs, rhs = line.split("\t")
                rules.append(TokenRule(tuple(lhs.split()), tuple(rhs.split())))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad rule line {line!r}: {exc}") from exc
    return rules


def default_rules(first_segment: Callable[[str], str] = first_atom_token):
    return [ReactantSwap(first_segment), ReactantDrop()]


def known_positive_index(records: Iterable) -> Set[str]:
    """Normalized strings of positive reactions (accepts records or RawReaction)."""
    index = set()
    for rec in records:
        if isinstance(rec, LabeledReaction):
            if rec.label == 1:
                index.add(rec.key)
        else:
            index.add(normalize_reaction(rec).render())
    return index


def generate_negatives(positives: Sequence, rules: Sequence, known_index: Set[str],
                       cap: int, seed: Optional[int] = None) -> List[LabeledReaction]:
    """Enumerate rule candidates per positive and keep those absent from ``known_index``.

    Positives are visited round-robin (one candidate each per round) so that a
    small cap still spreads over the corpus. With ``seed`` the visiting order
    is shuffled first.
    """
    if cap <= 0 or not rules:
        return []
    base = [p.reaction if isinstance(p, LabeledReaction) else p for p in positives]
    base = [normalize_reaction(r) for r in base]
    if seed is not None:
        random.Random(seed).shuffle(base)
    for rule in rules:
        rule.prepare(base)

    def per_positive(r: RawReaction) -> Iterator[RawReaction]:
        for rule in rules:
            yield from rule.candidates(r)

    streams = [per_positive(r) for r in base]
    seen: Set[str] = set()
    out: List[LabeledReaction] = []
    while streams and len(out) < cap:
        alive = []
        for it in streams:
            for cand in it:
                try:
                    norm = normalize_reaction(cand)
                except UnbalancedBrackets:
                    continue
                key = norm.render()
                if key in known_index or key in seen:
                    continue
                seen.add(key)
                out.append(LabeledReaction(norm, 0, RULE_GENERATED))
                alive.append(it)
                break
            if len(out) >= cap:
                break
        streams = alive
    return out


def incremental_mix(base_train: Sequence, pool: Sequence, ratio: float) -> list:
    """``base_train`` plus the first ``floor(ratio * len(pool))`` pool items."""
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"ratio must lie in [0, 1], got {ratio}")
    # guard against 0.29 * 100 == 28.999999999999996
    k = min(len(pool), int(math.floor(ratio * len(pool) + 1e-9)))
    return list(base_train) + list(islice(pool, k))
