"""Synthetic corpora for smoke tests and sanity runs.

``uspto_like`` assembles reaction SMILES from a handful of textbook templates
(amide coupling, esterification, Williamson ether, Suzuki coupling, reductive
amination) and fragment lists. The output only needs to look like patent
reaction text; it is not checked for chemical validity.
"""
from __future__ import annotations

import random
from typing import List, Optional, Sequence, Tuple

from .pipeline import Features
from .smiles_text import normalize_text

ACYL = ["C", "CC", "CCC", "CC(C)", "CC(C)(C)", "C1CCCCC1", "C1CCCC1", "c1ccccc1",
        "c1ccc(Cl)cc1", "c1ccc(F)cc1", "c1ccc(OC)cc1", "c1ccc(C)cc1", "c1ccncc1", "c1ccsc1",
        "c1ccoc1", "C=CC", "N#CCC", "COCC", "c1ccc2ccccc2c1", "c1ccc(Br)cc1", "FC(F)(F)C",
        "CSCC", "c1cnccn1", "CC(=O)CC", "c1ccc(C#N)cc1", "c1cccc(C)c1", "C1CC1", "CCOCC",
        "c1ccc2[nH]ccc2c1", "CC(C)C"]
ALKYL = ["C", "CC", "CCC", "CCCC", "CC(C)C", "C(C)C", "Cc1ccccc1", "CCc1ccccc1", "C1CCCC1",
         "C1CCCCC1", "CCOC", "CCN(C)C", "Cc1ccncc1", "CC=C", "CC#C", "CCCl", "CCO", "Cc1ccco1",
         "CC(F)(F)F", "CCCCCC", "C1CC1", "CCC(C)C", "Cc1ccc(Cl)cc1", "Cc1ccc(OC)cc1", "CCSC",
         "CC1CCOCC1", "Cc1cccs1", "CCCO", "CC(C)(C)C", "CCc1ccncc1"]
ARYL_SUB = ["C", "F", "Cl", "OC", "C(F)(F)F", "C#N", "N(C)C", "C(C)=O", "OCC", "[N+](=O)[O-]",
            "S(C)(=O)=O", "CC"]

TEMPLATES = ("amide", "ester", "ether", "suzuki", "reductive_amination")
REAGENTS = {
    "amide": ["CN(C)C=O", "CCN(CC)CC", "CN(C)C=O.CCN(C(C)C)C(C)C"],
    "ester": ["OS(=O)(=O)O", "c1ccncc1"],
    "ether": ["O=C([O-])[O-].[K+].[K+]", "CC(C)=O.O=C([O-])[O-].[Cs+].[Cs+]"],
    "suzuki": ["[Pd]", "c1ccc(P(c2ccccc2)c2ccccc2)cc1.[Pd]", "O=C([O-])[O-].[Na+].[Na+]"],
    "reductive_amination": ["[BH4-].[Na+]", "CC(=O)O[BH-](OC(C)=O)OC(C)=O.[Na+]", "ClCCl"],
}


def _reaction(kind: str, rng: random.Random) -> Tuple[List[str], str]:
    if kind == "amide":
        r1, r2 = rng.choice(ACYL), rng.choice(ALKYL)
        return [f"{r1}C(=O)O", f"N{r2}"], f"{r1}C(=O)N{r2}"
    if kind == "ester":
        r1, r2 = rng.choice(ACYL), rng.choice(ALKYL)
        return [f"{r1}C(=O)O", f"O{r2}"], f"{r1}C(=O)O{r2}"
    if kind == "ether":
        x, r2 = rng.choice(ARYL_SUB), rng.choice(ALKYL)
        return [f"Oc1ccc({x})cc1", f"Br{r2}"], f"{r2}Oc1ccc({x})cc1"
    if kind == "suzuki":
        x, y = rng.choice(ARYL_SUB), rng.choice(ARYL_SUB)
        return [f"Brc1ccc({x})cc1", f"OB(O)c1ccc({y})cc1"], f"{x}c1ccc(cc1)-c2ccc({y})cc2"
    if kind == "reductive_amination":
        r1, r2 = rng.choice(ACYL), rng.choice(ALKYL)
        return [f"{r1}C=O", f"N{r2}"], f"{r1}CN{r2}"
    raise ValueError(f"unknown template {kind!r}")


def uspto_like(n: int, seed: int = 0, templates: Sequence[str] = TEMPLATES,
               max_tries: Optional[int] = None) -> List[str]:
    """``n`` distinct reaction strings ``reactants>reagents>products``."""
    rng = random.Random(seed)
    seen = set()
    out: List[str] = []
    tries = 0
    max_tries = max_tries or 50 * n
    while len(out) < n:
        tries += 1
        if tries > max_tries:
            raise ValueError(f"could only build {len(out)} distinct reactions")
        kind = rng.choice(templates)
        reactants, product = _reaction(kind, rng)
        rng.shuffle(reactants)
        reagent = rng.choice(REAGENTS[kind]) if rng.random() < 0.8 else ""
        text = f"{'.'.join(reactants)}>{reagent}>{product}"
        key = normalize_text(text)
        if key in seen:
            continue
        seen.add(key)
        out.append(text)
    return out


def marker_task(n: int, seed: int = 0, alphabet_size: int = 20, min_len: int = 5,
                max_len: int = 30, marker: str = "X") -> Tuple[List[Features], List[int]]:
    """Random token sequences; the label is 1 exactly when ``marker`` occurs in the reactant side."""
    rng = random.Random(seed)
    alphabet = [f"t{k}" for k in range(alphabet_size)]
    feats, labels = [], []
    for _ in range(n):
        label = rng.random() < 0.5
        reactant = [rng.choice(alphabet) for _ in range(rng.randint(min_len, max_len))]
        if label:
            reactant[rng.randrange(len(reactant))] = marker
        product = [rng.choice(alphabet) for _ in range(rng.randint(min_len, max_len))]
        rsd = [rng.choice(["_", "RR", "AR:c", "AD:C"]) for _ in range(len(reactant) + 1)]
        feats.append(Features(reactant, product, rsd))
        labels.append(int(label))
    return feats, labels
