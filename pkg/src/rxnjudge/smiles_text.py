"""Reaction SMILES parsing, atom-map stripping and atom-wise tokenization.

A reaction is written ``reactants>reagents>products`` with molecules inside a
group joined by ``.``. Normalization here is deliberately textual: atom maps are
removed, trivially bracketed organic atoms are unwrapped, and molecules are
sorted inside each group. No graph canonicalization is attempted.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .errors import MalformedReaction, UnbalancedBrackets

ORGANIC_SUBSET = frozenset(["B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I",
                            "b", "c", "n", "o", "p", "s"])
TWO_LETTER_ORGANIC = ("Cl", "Br")
MOLECULE_SEP = "."

_ATOM_MAP = re.compile(r":\d+")
# symbol followed by nothing but an optional hydrogen count
_UNWRAPPABLE = re.compile(r"^(Cl|Br|[BCNOPSFI]|[bcnops])(?:H\d*)?$")


@dataclass(frozen=True)
class RawReaction:
    reactants: Tuple[str, ...]
    reagents: Tuple[str, ...]
    products: Tuple[str, ...]

    def render(self) -> str:
        return ">".join(MOLECULE_SEP.join(g) for g in
                        (self.reactants, self.reagents, self.products))

    def __str__(self) -> str:
        return self.render()


def _split_group(group: str, text: str) -> Tuple[str, ...]:
    if group == "":
        return ()
    mols = tuple(group.split(MOLECULE_SEP))
    if any(m == "" for m in mols):
        raise MalformedReaction(f"empty molecule in group {group!r} of {text!r}")
    return mols


def parse_reaction(text: str) -> RawReaction:
    """Split ``reactants>reagents>products`` into its three molecule groups.

    Raises MalformedReaction when there are not exactly two ``>`` separators,
    when the reactant or product group is empty, or on stray empty molecules.
    """
    text = text.strip()
    if not text:
        raise MalformedReaction("empty reaction string")
    parts = text.split(">")
    if len(parts) != 3:
        raise MalformedReaction(f"expected 2 '>' separators, found {len(parts) - 1}: {text!r}")
    reactants, reagents, products = (_split_group(p, text) for p in parts)
    if not reactants:
        raise MalformedReaction(f"empty reactants group: {text!r}")
    if not products:
        raise MalformedReaction(f"empty products group: {text!r}")
    return RawReaction(reactants, reagents, products)


def _bracket_spans(molecule: str) -> List[Tuple[int, int]]:
    spans = []
    start = -1
    for i, ch in enumerate(molecule):
        if ch == "[":
            if start >= 0:
                raise UnbalancedBrackets(f"nested '[' at {i} in {molecule!r}")
            start = i
        elif ch == "]":
            if start < 0:
                raise UnbalancedBrackets(f"unmatched ']' at {i} in {molecule!r}")
            spans.append((start, i))
            start = -1
    if start >= 0:
        raise UnbalancedBrackets(f"unclosed '[' at {start} in {molecule!r}")
    return spans


def strip_atom_maps(molecule: str) -> str:
    """Remove ``:n`` atom-map suffixes and unwrap trivial bracket atoms.

    ``[CH2:10]`` becomes ``C``; ``[OH3+]``, ``[C@@H]``, ``[13C]`` and ``[H]``
    keep their brackets since unwrapping them would change the molecule.
    """
    spans = _bracket_spans(molecule)
    if not spans:
        return molecule
    out = []
    prev = 0
    for start, end in spans:
        out.append(molecule[prev:start])
        inner = _ATOM_MAP.sub("", molecule[start + 1:end])
        m = _UNWRAPPABLE.match(inner)
        out.append(m.group(1) if m else f"[{inner}]")
        prev = end + 1
    out.append(molecule[prev:])
    return "".join(out)


def tokenize_atomwise(molecule: str) -> List[str]:
    """Split a molecule string into atom, bond, ring-digit and bracket tokens.

    >>> tokenize_atomwise("ClCC1CO1")
    ['Cl', 'C', 'C', '1', 'C', 'O', '1']
    >>> tokenize_atomwise("C#C[Mg]Br")
    ['C', '#', 'C', '[', 'Mg', ']', 'Br']
    """
    tokens = []
    i = 0
    n = len(molecule)
    in_bracket = False
    while i < n:
        ch = molecule[i]
        if in_bracket:
            if ch == "]":
                in_bracket = False
                tokens.append(ch)
                i += 1
            elif ch.isupper() and i + 1 < n and molecule[i + 1].islower():
                tokens.append(molecule[i:i + 2])
                i += 2
            else:
                tokens.append(ch)
                i += 1
        elif ch == "[":
            in_bracket = True
            tokens.append(ch)
            i += 1
        elif molecule.startswith(TWO_LETTER_ORGANIC, i):
            tokens.append(molecule[i:i + 2])
            i += 2
        else:
            tokens.append(ch)
            i += 1
    return tokens


def tokenize_group(molecules: Sequence[str]) -> List[str]:
    """Tokenize a molecule group into one stream with ``.`` tokens between molecules."""
    stream: List[str] = []
    for k, mol in enumerate(molecules):
        if k:
            stream.append(MOLECULE_SEP)
        stream.extend(tokenize_atomwise(mol))
    return stream


def normalize_reaction(r: RawReaction) -> RawReaction:
    def norm(group):
        return tuple(sorted(strip_atom_maps(m) for m in group))
    return RawReaction(norm(r.reactants), norm(r.reagents), norm(r.products))


def normalize_text(text: str) -> str:
    """Parse and normalize in one step, returning the rendered string."""
    return normalize_reaction(parse_reaction(text)).render()
