"""Reaction Symbol Distance: an edit script from reactant tokens to product tokens.

Every source position gets one tag, plus a sentinel slot at the end for
trailing insertions:

    _        copy the source token
    RR       delete the source token
    AR(p)    emit payload ``p`` instead of the source token
    AD(p)    emit payload ``p``, then copy the source token

An insertion run that lands in front of a substituted token is folded into
that token's AR payload, so every slot holds exactly one tag. A minimal script
never inserts in front of a deletion (a substitution would be cheaper), so
that case cannot arise.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .errors import LengthMismatch

NOP = "_"
ADD = "AD"
REPLACE = "AR"
DELETE = "RR"


@dataclass(frozen=True)
class RsdTag:
    kind: str
    payload: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind in (ADD, REPLACE):
            if not self.payload:
                raise ValueError(f"{self.kind} tag needs a payload")
        elif self.kind in (NOP, DELETE):
            if self.payload:
                raise ValueError(f"{self.kind} tag takes no payload")
        else:
            raise ValueError(f"unknown RSD tag kind {self.kind!r}")

    @property
    def cost(self) -> int:
        if self.kind == NOP:
            return 0
        if self.kind == DELETE:
            return 1
        return len(self.payload)

    def token(self) -> str:
        if self.kind in (NOP, DELETE):
            return self.kind
        return f"{self.kind}:{''.join(self.payload)}"

    def __str__(self) -> str:
        if self.kind in (NOP, DELETE):
            return self.kind
        return f"{self.kind}({' '.join(self.payload)})"


@dataclass(frozen=True)
class RsdSequence:
    tags: Tuple[RsdTag, ...]
    source_len: int
    target_len: int

    def __post_init__(self):
        if len(self.tags) != self.source_len + 1:
            raise LengthMismatch(
                f"{len(self.tags)} tags for a source of length {self.source_len}")
        if self.tags[-1].kind not in (NOP, ADD):
            raise ValueError("sentinel slot may only hold AD or _")

    @property
    def cost(self) -> int:
        return sum(t.cost for t in self.tags)


def _distance_table(S: Sequence[str], T: Sequence[str]) -> List[List[int]]:
    n, m = len(S), len(T)
    D = [[0] * (m + 1) for _ in range(n + 1)]
    for j in range(m + 1):
        D[0][j] = j
    for i in range(1, n + 1):
        row, prev = D[i], D[i - 1]
        row[0] = i
        s = S[i - 1]
        for j in range(1, m + 1):
            sub = prev[j - 1] + (s != T[j - 1])
            dele = prev[j] + 1
            ins = row[j - 1] + 1
            row[j] = min(sub, dele, ins)
    return D


def edit_distance(S: Sequence[str], T: Sequence[str]) -> int:
    """Token-level Levenshtein distance with unit costs."""
    if len(T) > len(S):
        S, T = T, S
    prev = list(range(len(T) + 1))
    for i, s in enumerate(S, 1):
        cur = [i] + [0] * len(T)
        for j, t in enumerate(T, 1):
            cur[j] = min(prev[j - 1] + (s != t), prev[j] + 1, cur[j - 1] + 1)
        prev = cur
    return prev[-1]


def generate_rsd(S: Sequence[str], T: Sequence[str]) -> RsdSequence:
    """Trace one minimal edit script back from the DP table.

    Preference at each cell is match, then substitution, then deletion, then
    insertion, which makes the script deterministic.
    """
    S, T = list(S), list(T)
    n, m = len(S), len(T)
    D = _distance_table(S, T)
    ops: List[Optional[Tuple[str, Optional[str]]]] = [None] * n
    inserts: List[List[str]] = [[] for _ in range(n + 1)]
    i, j = n, m
    while i > 0 or j > 0:
        d = D[i][j]
        if i and j and S[i - 1] == T[j - 1] and d == D[i - 1][j - 1]:
            ops[i - 1] = (NOP, None)
            i, j = i - 1, j - 1
        elif i and j and d == D[i - 1][j - 1] + 1:
            ops[i - 1] = (REPLACE, T[j - 1])
            i, j = i - 1, j - 1
        elif i and d == D[i - 1][j] + 1:
            ops[i - 1] = (DELETE, None)
            i -= 1
        else:
            # insertion lands right before source slot i; walking backwards, prepend
            inserts[i].insert(0, T[j - 1])
            j -= 1
    tags = []
    for pos in range(n + 1):
        ins = tuple(inserts[pos])
        if pos == n:
            tags.append(RsdTag(ADD, ins) if ins else RsdTag(NOP))
            continue
        kind, tok = ops[pos]
        if kind == REPLACE:
            tags.append(RsdTag(REPLACE, ins + (tok,)))
        elif kind == DELETE:
            if ins:
                raise AssertionError("insertion before deletion in a minimal script")
            tags.append(RsdTag(DELETE))
        elif ins:
            tags.append(RsdTag(ADD, ins))
        else:
            tags.append(RsdTag(NOP))
    return RsdSequence(tuple(tags), n, m)


def apply_rsd(S: Sequence[str], R: RsdSequence) -> List[str]:
    if R.source_len != len(S):
        raise LengthMismatch(f"RSD built for length {R.source_len}, source has {len(S)}")
    out: List[str] = []
    for tok, tag in zip(S, R.tags):
        if tag.kind == NOP:
            out.append(tok)
        elif tag.kind == ADD:
            out.extend(tag.payload)
            out.append(tok)
        elif tag.kind == REPLACE:
            out.extend(tag.payload)
    sentinel = R.tags[-1]
    if sentinel.kind == ADD:
        out.extend(sentinel.payload)
    return out


def rsd_tokens(R: RsdSequence) -> List[str]:
    return [t.token() for t in R.tags]


def alignment_rows(S: Sequence[str], R: RsdSequence, T: Sequence[str]) -> Tuple[str, str, str]:
    """Source, tag and target rows, TAB-separated, for display."""
    src = list(S) + ["$"]
    return ("\t".join(src), "\t".join(str(t) for t in R.tags), "\t".join(T))
