#!/usr/bin/env python3
"""Generate tests/data/smiles_corpus.tsv.

Independent reference implementation: parses each corpus SMILES with a
regex-based tokenizer, counts rings via the cyclomatic number, marks ring
bonds via bridge detection, and derives implicit hydrogens from default
valences. Before writing the fixture it asserts the computed molecular
formula of every anchored molecule against its published formula, so the
hydrogen/valence conventions are pinned to public chemistry facts rather
than to the code under test.

Usage: python3 tests/tools/gen_smiles_corpus.py [out.tsv]
"""

import re
import sys
from collections import Counter

ORGANIC = ["Cl", "Br", "B", "C", "N", "O", "P", "S", "F", "I"]
AROMATIC = ["b", "c", "n", "o", "p", "s"]
VALENCES = {
    "B": [3], "C": [4], "N": [3], "O": [2], "P": [3, 5],
    "S": [2, 4, 6], "F": [1], "Cl": [1], "Br": [1], "I": [1],
}

TOKEN = re.compile(
    r"(?P<bracket>\[[^\]]*\])"
    r"|(?P<organic>Cl|Br|B|C|N|O|P|S|F|I|b|c|n|o|p|s)"
    r"|(?P<bond>[-=#:/\\])"
    r"|(?P<ring>%\d\d|\d)"
    r"|(?P<open>\()"
    r"|(?P<close>\))"
)

BRACKET = re.compile(
    r"^\[(?P<iso>\d+)?(?P<sym>[A-Z][a-z]?|[a-z])(?P<chi>@{0,2})"
    r"(?P<h>H\d*)?(?P<chg>\+\d|-\d|\++|-+)?(?::\d+)?\]$"
)

BOND_ORDER = {"-": 1, "/": 1, "\\": 1, "=": 2, "#": 3, ":": "ar"}


class Mol:
    def __init__(self):
        self.elements = []
        self.charges = []
        self.explicit_h = []   # None = unset
        self.aromatic = []
        self.bonds = []        # (a, b, order) with order 1|2|3|"ar"|None


def parse(s):
    mol = Mol()
    prev = None
    stack = []
    pending = None
    ring = {}

    def add_atom(element, aromatic, charge=0, h=None):
        nonlocal prev, pending
        idx = len(mol.elements)
        mol.elements.append(element)
        mol.charges.append(charge)
        mol.explicit_h.append(h)
        mol.aromatic.append(aromatic)
        if prev is not None:
            mol.bonds.append((prev, idx, pending))
        pending = None
        prev = idx

    pos = 0
    while pos < len(s):
        m = TOKEN.match(s, pos)
        if not m:
            raise ValueError(f"bad token at {pos} in {s!r}")
        pos = m.end()
        if m.lastgroup == "organic":
            t = m.group()
            if t in AROMATIC:
                add_atom(t.upper(), True)
            else:
                add_atom(t, False)
        elif m.lastgroup == "bracket":
            b = BRACKET.match(m.group())
            if not b:
                raise ValueError(f"bad bracket {m.group()!r}")
            sym = b.group("sym")
            aromatic = sym.islower()
            sym = sym.capitalize()
            if sym not in VALENCES:
                raise ValueError(f"element {sym!r}")
            h = b.group("h")
            h = 0 if h is None else (1 if h == "H" else int(h[1:]))
            chg = b.group("chg") or ""
            if chg.startswith("+") and len(chg) > 1 and chg[1].isdigit():
                charge = int(chg[1])
            elif chg.startswith("-") and len(chg) > 1 and chg[1].isdigit():
                charge = -int(chg[1])
            else:
                charge = chg.count("+") - chg.count("-")
            add_atom(sym, aromatic, charge, h)
        elif m.lastgroup == "bond":
            if pending is not None:
                raise ValueError("double bond symbol")
            pending = BOND_ORDER[m.group()]
        elif m.lastgroup == "ring":
            t = m.group()
            digit = int(t[1:]) if t.startswith("%") else int(t)
            if digit in ring:
                other, other_order = ring.pop(digit)
                if other_order is not None and pending is not None:
                    assert other_order == pending, "ring bond mismatch"
                order = other_order if other_order is not None else pending
                mol.bonds.append((other, prev, order))
                pending = None
            else:
                ring[digit] = (prev, pending)
                pending = None
        elif m.lastgroup == "open":
            stack.append(prev)
        elif m.lastgroup == "close":
            prev = stack.pop()
    assert not ring, f"unclosed ring in {s!r}"
    assert not stack, f"unclosed branch in {s!r}"
    assert pending is None
    return mol


def bridges(n_atoms, bonds):
    """Indices of bridge bonds (Tarjan low-link)."""
    adj = [[] for _ in range(n_atoms)]
    for i, (a, b, _) in enumerate(bonds):
        adj[a].append((b, i))
        adj[b].append((a, i))
    disc = [-1] * n_atoms
    low = [0] * n_atoms
    out = set()
    t = [0]

    def dfs(u, in_bond):
        disc[u] = low[u] = t[0]
        t[0] += 1
        for v, bi in adj[u]:
            if bi == in_bond:
                continue
            if disc[v] == -1:
                dfs(v, bi)
                low[u] = min(low[u], low[v])
                if low[v] > disc[u]:
                    out.add(bi)
            else:
                low[u] = min(low[u], disc[v])

    sys.setrecursionlimit(10000)
    dfs(0, -1)
    assert all(d >= 0 for d in disc), "disconnected molecule"
    return out


def finish(mol):
    """Resolve default bond orders, ring flags, implicit hydrogens."""
    bridge_set = bridges(len(mol.elements), mol.bonds)
    resolved = []
    for i, (a, b, order) in enumerate(mol.bonds):
        if order is None:
            if mol.aromatic[a] and mol.aromatic[b] and i not in bridge_set:
                order = "ar"
            else:
                order = 1
        resolved.append((a, b, order))
    mol.bonds = resolved
    ring_atoms = set()
    for i, (a, b, _) in enumerate(mol.bonds):
        if i not in bridge_set:
            ring_atoms.add(a)
            ring_atoms.add(b)
    for i, arom in enumerate(mol.aromatic):
        assert not arom or i in ring_atoms, f"aromatic atom {i} outside ring"

    implicit = []
    for i, elem in enumerate(mol.elements):
        total = 0
        n_ar = 0
        for a, b, order in mol.bonds:
            if i not in (a, b):
                continue
            if order == "ar":
                n_ar += 1
            else:
                total += order
        total += n_ar
        if n_ar:
            expl = mol.explicit_h[i] or 0
            if elem in ("B", "C") or (elem in ("N", "P") and expl < 1):
                total += 1
        allowed = VALENCES[elem]
        val = next((v for v in allowed if v >= total), allowed[-1])
        expl = mol.explicit_h[i] or 0
        implicit.append(max(0, val - total - expl - abs(mol.charges[i])))
    mol.implicit = implicit
    mol.n_rings = len(mol.bonds) - len(mol.elements) + 1
    return mol


def formula(mol):
    counts = Counter(mol.elements)
    h = sum(mol.implicit) + sum(x or 0 for x in mol.explicit_h)
    parts = []
    for e in ["C", "H"]:
        n = counts.pop("C", 0) if e == "C" else h
        if n:
            parts.append(e + (str(n) if n > 1 else ""))
    for e in sorted(counts):
        n = counts[e]
        parts.append(e + (str(n) if n > 1 else ""))
    return "".join(parts)


# (smiles, published molecular formula or None, net charge)
CORPUS = [
    ("C", "CH4", 0),
    ("CC", "C2H6", 0),
    ("CCC", "C3H8", 0),
    ("CCCC", "C4H10", 0),
    ("CC(C)C", "C4H10", 0),
    ("CCCCCCCCCC", "C10H22", 0),
    ("C=C", "C2H4", 0),
    ("C#C", "C2H2", 0),
    ("C#N", "CHN", 0),
    ("C=O", "CH2O", 0),
    ("CO", "CH4O", 0),
    ("CCO", "C2H6O", 0),
    ("OCCO", "C2H6O2", 0),
    ("OCC(O)CO", "C3H8O3", 0),
    ("CC(C)=O", "C3H6O", 0),
    ("CC(=O)O", "C2H4O2", 0),
    ("C(=O)O", "CH2O2", 0),
    ("CCOC(C)=O", "C4H8O2", 0),
    ("CC(=O)CC(C)=O", "C5H8O2", 0),
    ("CC=CC", "C4H8", 0),
    ("C/C=C/C", "C4H8", 0),
    ("CC#CC", "C4H6", 0),
    ("C=CC=C", "C4H6", 0),
    ("CC(C)=CC", "C5H10", 0),
    ("C1CC1", "C3H6", 0),
    ("C1CCCC1", "C5H10", 0),
    ("C1CCCCC1", "C6H12", 0),
    ("OC1CCCCC1", "C6H12O", 0),
    ("O=C1CCCCC1", "C6H10O", 0),
    ("C1CCOC1", "C4H8O", 0),
    ("C1COCCO1", "C4H8O2", 0),
    ("C1COCCN1", "C4H9NO", 0),
    ("C1CCNCC1", "C5H11N", 0),
    ("C1CCNC1", "C4H9N", 0),
    ("C1CC2CCC1C2", "C7H12", 0),
    ("C1CC2CCC1CC2", "C8H14", 0),
    ("C1C2CC3CC1CC(C2)C3", "C10H16", 0),
    ("c1ccccc1", "C6H6", 0),
    ("Cc1ccccc1", "C7H8", 0),
    ("Cc1ccccc1C", "C8H10", 0),
    ("CC(C)c1ccccc1", "C9H12", 0),
    ("C=Cc1ccccc1", "C8H8", 0),
    ("Oc1ccccc1", "C6H6O", 0),
    ("COc1ccccc1", "C7H8O", 0),
    ("Nc1ccccc1", "C6H7N", 0),
    ("Fc1ccccc1", "C6H5F", 0),
    ("Clc1ccccc1", "C6H5Cl", 0),
    ("Brc1ccccc1", "C6H5Br", 0),
    ("Ic1ccccc1", "C6H5I", 0),
    ("N#Cc1ccccc1", "C7H5N", 0),
    ("OC(=O)c1ccccc1", "C7H6O2", 0),
    ("OC(=O)C=Cc1ccccc1", "C9H8O2", 0),
    ("c1ccncc1", "C5H5N", 0),
    ("c1cc[nH]c1", "C4H5N", 0),
    ("c1ccoc1", "C4H4O", 0),
    ("c1ccsc1", "C4H4S", 0),
    ("c1cnc[nH]1", "C3H4N2", 0),
    ("Nc1nccs1", "C3H4N2S", 0),
    ("c1ccc2ccccc2c1", "C10H8", 0),
    ("c1ccc2cc3ccccc3cc2c1", "C14H10", 0),
    ("c1ccc2c(c1)ccc1ccccc12", "C14H10", 0),
    ("c1ccc(-c2ccccc2)cc1", "C12H10", 0),
    ("c1ccc2[nH]ccc2c1", "C8H7N", 0),
    ("c1ccc2ncccc2c1", "C9H7N", 0),
    ("CC(=O)Oc1ccccc1C(=O)O", "C9H8O4", 0),
    ("Cn1cnc2c1c(=O)n(C)c(=O)n2C", "C8H10N4O2", 0),
    ("CC(C)Cc1ccc(C(C)C(=O)O)cc1", "C13H18O2", 0),
    ("CC(=O)Nc1ccc(O)cc1", "C8H9NO2", 0),
    ("CN1CCC[C@H]1c1cccnc1", "C10H14N2", 0),
    ("N[C@@H](Cc1ccccc1)C(=O)O", "C9H11NO2", 0),
    ("NCC(=O)O", "C2H5NO2", 0),
    ("CC(N)C(=O)O", "C3H7NO2", 0),
    ("NC(N)=O", "CH4N2O", 0),
    ("CCN(CC)CC", "C6H15N", 0),
    ("CSC", "C2H6S", 0),
    ("CCS", "C2H6S", 0),
    ("CS(C)=O", "C2H6OS", 0),
    ("CS(=O)(=O)O", "CH4O3S", 0),
    ("OS(=O)(=O)O", "H2O4S", 0),
    ("Cc1ccc(cc1)S(=O)(=O)O", "C7H8O3S", 0),
    ("Nc1ccc(cc1)S(=O)(=O)N", "C6H8N2O2S", 0),
    ("OP(=O)(O)O", "H3O4P", 0),
    ("COP(=O)(OC)OC", "C3H9O4P", 0),
    ("c1ccc(P(c2ccccc2)c2ccccc2)cc1", "C18H15P", 0),
    ("OB(O)c1ccccc1", "C6H7BO2", 0),
    ("B(C)(C)C", "C3H9B", 0),
    ("ClCCl", "CH2Cl2", 0),
    ("ClC(Cl)Cl", "CHCl3", 0),
    ("FC(F)F", "CHF3", 0),
    ("CCBr", "C2H5Br", 0),
    ("CI", "CH3I", 0),
    ("O=[N+]([O-])c1ccccc1", "C6H5NO2", 0),
    ("C[N+](C)(C)C", "C4H12N", 1),
    ("[NH4+]", "H4N", 1),
    ("C[NH3+]", "CH6N", 1),
    ("CC(=O)[O-]", "C2H3O2", -1),
    ("[O-]c1ccccc1", "C6H5O", -1),
    ("OCC1OC(O)C(O)C(O)C1O", "C6H12O6", 0),
    ("O=C(O)CC(O)(CC(=O)O)C(=O)O", "C6H8O7", 0),
    ("CCCCCC(=O)O", "C6H12O2", 0),
]


def main():
    out_path = sys.argv[1] if len(sys.argv) > 1 else "tests/data/smiles_corpus.tsv"
    rows = []
    for smiles, expect, expect_charge in CORPUS:
        mol = finish(parse(smiles))
        f = formula(mol)
        charge = sum(mol.charges)
        if expect is not None:
            assert f == expect, f"{smiles}: computed {f}, published {expect}"
            assert charge == expect_charge, f"{smiles}: charge {charge}"
        rows.append(
            "\t".join(
                [
                    smiles,
                    str(len(mol.elements)),
                    str(len(mol.bonds)),
                    str(mol.n_rings),
                    f,
                    str(charge),
                    "".join("1" if a else "0" for a in mol.aromatic),
                    ",".join(str(h) for h in mol.implicit),
                ]
            )
        )
    assert len(rows) == 100, f"corpus has {len(rows)} entries"
    with open(out_path, "w") as fh:
        fh.write("smiles\tn_atoms\tn_bonds\tn_rings\tformula\tcharge"
                 "\taromatic\timplicit_h\n")
        fh.write("\n".join(rows) + "\n")
    print(f"wrote {len(rows)} molecules to {out_path}")


if __name__ == "__main__":
    main()
