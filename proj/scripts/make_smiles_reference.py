# SPDX-License-Identifier: Apache-2.0
"""Generate tests/data/smiles_reference.csv.

Self-contained SMILES interpreter, written only from the documented grammar
and hydrogen-count rules. It shares no code with the C++ parser so the two
implementations can check each other. Frozen output is committed; rerun this
script only when the corpus itself changes.
"""

import csv
import math
import os
import sys

ORGANIC = {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"}
BRACKET_ELEMENTS = ORGANIC | {"H"}
AROMATIC = {"b", "c", "n", "o", "p", "s"}
BOND_CHARS = {"-": 1.0, "=": 2.0, "#": 3.0, ":": 1.5}


class Mol:
    def __init__(self):
        # atom: dict(element, aromatic, charge, explicit_h, bracket)
        self.atoms = []
        self.bonds = []  # (a, b, order)


def parse(text):
    mol = Mol()
    stack = []
    prev = -1
    pending = None  # bond order awaiting the next atom or ring closure
    rings = {}  # digit -> (atom, order-or-None)
    i, n = 0, len(text)

    def add_atom(atom):
        nonlocal prev, pending
        mol.atoms.append(atom)
        idx = len(mol.atoms) - 1
        if prev >= 0:
            order = pending
            if order is None:
                order = (
                    1.5
                    if mol.atoms[prev]["aromatic"] and atom["aromatic"]
                    else 1.0
                )
            mol.bonds.append((prev, idx, order))
        elif pending is not None:
            raise ValueError("bond with no preceding atom")
        pending = None
        prev = idx

    while i < n:
        c = text[i]
        if c == "[":
            i += 1
            while i < n and text[i].isdigit():  # isotope label ignored
                i += 1
            aromatic = False
            if text[i : i + 2] in ("Cl", "Br"):
                element = text[i : i + 2]
                i += 2
            elif text[i] in AROMATIC:
                element = text[i].upper()
                aromatic = True
                i += 1
            elif text[i].isupper() and text[i] in BRACKET_ELEMENTS:
                element = text[i]
                i += 1
            else:
                raise ValueError("bad bracket element")
            while i < n and text[i] == "@":
                i += 1
            explicit_h = 0
            if i < n and text[i] == "H":
                i += 1
                if i < n and text[i].isdigit():
                    explicit_h = 0
                    while i < n and text[i].isdigit():
                        explicit_h = explicit_h * 10 + int(text[i])
                        i += 1
                else:
                    explicit_h = 1
            charge = 0
            if i < n and text[i] in "+-":
                sign = 1 if text[i] == "+" else -1
                i += 1
                if i < n and text[i].isdigit():
                    mag = 0
                    while i < n and text[i].isdigit():
                        mag = mag * 10 + int(text[i])
                        i += 1
                else:
                    mag = 1
                    while i < n and text[i] == text[i - 1]:
                        mag += 1
                        i += 1
                charge = sign * mag
            if i >= n or text[i] != "]":
                raise ValueError("unterminated bracket")
            i += 1
            add_atom(
                dict(
                    element=element,
                    aromatic=aromatic,
                    charge=charge,
                    explicit_h=explicit_h,
                    bracket=True,
                )
            )
        elif c in BOND_CHARS:
            if pending is not None:
                raise ValueError("consecutive bonds")
            pending = BOND_CHARS[c]
            i += 1
        elif c == "(":
            stack.append(prev)
            i += 1
        elif c == ")":
            prev = stack.pop()
            i += 1
        elif c.isdigit() or c == "%":
            if c == "%":
                digit = int(text[i + 1 : i + 3])
                i += 3
            else:
                digit = int(c)
                i += 1
            if digit in rings:
                a, lhs = rings.pop(digit)
                order = lhs if lhs is not None else pending
                if order is None:
                    order = (
                        1.5
                        if mol.atoms[a]["aromatic"]
                        and mol.atoms[prev]["aromatic"]
                        else 1.0
                    )
                mol.bonds.append((a, prev, order))
            else:
                rings[digit] = (prev, pending)
            pending = None
        elif c in AROMATIC:
            add_atom(
                dict(
                    element=c.upper(),
                    aromatic=True,
                    charge=0,
                    explicit_h=0,
                    bracket=False,
                )
            )
            i += 1
        elif text[i : i + 2] in ("Cl", "Br"):
            add_atom(
                dict(
                    element=text[i : i + 2],
                    aromatic=False,
                    charge=0,
                    explicit_h=0,
                    bracket=False,
                )
            )
            i += 2
        elif c.isupper() and c in ORGANIC:
            add_atom(
                dict(
                    element=c,
                    aromatic=False,
                    charge=0,
                    explicit_h=0,
                    bracket=False,
                )
            )
            i += 1
        else:
            raise ValueError(f"unexpected character {c!r}")
    if stack or pending is not None or rings:
        raise ValueError("unbalanced input")
    return mol


def hydrogen_count(mol, idx):
    atom = mol.atoms[idx]
    if atom["bracket"]:
        return atom["explicit_h"]
    total = sum(o for a, b, o in mol.bonds if idx in (a, b))
    element = atom["element"]
    if element == "C":
        valence = 4
    elif element in ("N", "B"):
        valence = 3
    elif element == "O":
        valence = 2
    elif element == "S":
        valence = min(v for v in (2, 4, 6) if v >= total - 1e-9)
    elif element == "P":
        valence = min(v for v in (3, 5) if v >= total - 1e-9)
    elif element in ("F", "Cl", "Br", "I", "H"):
        valence = 1
    else:
        return 0
    if atom["charge"] > 0 and element in ("N", "P"):
        valence += atom["charge"]
    elif atom["charge"] < 0:
        valence += atom["charge"]
    return max(0, math.floor(valence - total + 0.5))


def attributes(smiles):
    mol = parse(smiles)
    return dict(
        smiles=smiles,
        num_atoms=len(mol.atoms),
        num_bonds=len(mol.bonds),
        num_rings=len(mol.bonds) - len(mol.atoms) + 1,  # corpus is connected
        aromatic_atoms=sum(a["aromatic"] for a in mol.atoms),
        total_hydrogens=sum(hydrogen_count(mol, i) for i in range(len(mol.atoms))),
        formal_charge=sum(a["charge"] for a in mol.atoms),
    )


def build_corpus():
    corpus = [
        # aromatics and fused rings
        "c1ccccc1",
        "Cc1ccccc1",
        "Oc1ccccc1",
        "Nc1ccccc1",
        "c1ccc2ccccc2c1",
        "c1ccc2cc3ccccc3cc2c1",
        "c1ccc2c(c1)ccc1ccccc12",
        "c1ccncc1",
        "c1ccoc1",
        "c1ccsc1",
        "c1cc[nH]c1",
        "c1cnc[nH]1",
        "c1cscn1",
        "c1ccc2[nH]ccc2c1",
        "c1ccc2occc2c1",
        "c1ccc2sccc2c1",
        "c1ccc2ncccc2c1",
        "c1cnc2ccccc2c1",
        "c1cc2ccc3cccc4ccc(c1)c2c34",
        "C1=CC=CC=C1",
        "c1ccc(-c2ccccc2)cc1",
        "c1ccc(Oc2ccccc2)cc1",
        "c1ccc(Cc2ccccc2)cc1",
        # drugs and natural products (subset-safe encodings)
        "CC(=O)Oc1ccccc1C(=O)O",
        "CC(=O)Nc1ccc(O)cc1",
        "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
        "Cn1cnc2c1c(=O)n(C)c(=O)n2C",
        "CN1CCCC1c1cccnc1",
        "NCCc1c[nH]c2ccccc12",
        "NCCc1ccc(O)c(O)c1",
        "CNCC(O)c1ccc(O)c(O)c1",
        "CC(N)Cc1ccccc1",
        "CNC(C)Cc1ccccc1",
        "OCC(O)C(O)C(O)C(O)C=O",
        "OC(=O)CC(O)(CC(=O)O)C(=O)O",
        "C(C(=O)O)N",
        "N[C@@H](C)C(=O)O",
        "N[C@H](C)C(=O)O",
        "N[C@@H](CC(=O)O)C(=O)O",
        "N[C@@H](Cc1ccccc1)C(=O)O",
        "N[C@@H](CO)C(=O)O",
        "N[C@@H](CS)C(=O)O",
        "CC(C)[C@@H](N)C(=O)O",
        "OC(=O)c1ccccc1O",
        "OC(=O)c1ccccc1",
        "O=Cc1ccccc1",
        "CC(=O)c1ccccc1",
        "COc1ccccc1",
        "CCOC(=O)c1ccccc1",
        "Nc1ccc(cc1)S(=O)(=O)N",
        "CS(=O)(=O)c1ccccc1",
        "OS(=O)(=O)c1ccccc1",
        "Cc1ccc(cc1)S(=O)(=O)O",
        "Cc1c(cc(cc1[N+](=O)[O-])[N+](=O)[O-])[N+](=O)[O-]",
        "O=[N+]([O-])c1ccccc1",
        "Clc1ccccc1Cl",
        "Brc1ccc(Br)cc1",
        "Ic1ccccc1",
        "Fc1ccc(F)cc1F",
        "FC(F)(F)c1ccccc1",
        "ClC(Cl)(Cl)Cl",
        "BrCCBr",
        # charged and bracket atoms
        "[NH4+]",
        "[OH-]",
        "[CH3-]",
        "[NH2-]",
        "[O-2]",
        "[N+3]",
        "C[N+](C)(C)C",
        "CC[N+](CC)(CC)CC",
        "CC(=O)[O-]",
        "CC([O-])=O",
        "[O-]C(=O)C(=O)[O-]",
        "[O-]S(=O)(=O)[O-]",
        "[O-][N+](=O)c1ccc(cc1)[N+](=O)[O-]",
        "C[S+](C)C",
        "C[n+]1ccccc1",
        "[nH+]1ccccc1",
        "Oc1ccccc1[O-]",
        "[PH4+]",
        "[P+](C)(C)(C)C",
        "[SH-]",
        "[13CH4]",
        "[2H]O[2H]",
        "[13cH]1ccccc1",
        "[C@H](N)(C)C(=O)O",
        "[C@@H](N)(C)C(=O)O",
        # chains, branches and multiple bonds
        "C",
        "CC",
        "CCC",
        "CCCC",
        "CCCCC",
        "CCCCCC",
        "CCCCCCCC",
        "CCCCCCCCCC",
        "CC(C)C",
        "CC(C)(C)C",
        "CC(C)CC(C)(C)C",
        "C(C(C(C)C)C)C",
        "CC(CC(C)C)CC(C)C",
        "C=C",
        "CC=C",
        "CC=CC",
        "C=C(C)C",
        "C=CC=C",
        "C=CC=CC=C",
        "C#C",
        "CC#C",
        "CC#CC",
        "C#N",
        "CC#N",
        "N#CC#N",
        "C=C=C",
        "C=O",
        "CC=O",
        "CC(C)=O",
        "CCO",
        "CCN",
        "CCS",
        "CCOC",
        "CCOCC",
        "CNC",
        "CN(C)C",
        "CSC",
        "CSSC",
        "COC(=O)C",
        "CC(=O)OC",
        "CC(=O)NC",
        "CNC(=O)C",
        "NC(=O)N",
        "NC(=N)N",
        "CON",
        "CNO",
        "OO",
        "NN",
        "CP(C)C",
        "CP(=O)(O)O",
        "COP(=O)(O)OC",
        "OB(O)O",
        "CB(C)C",
        "CS(=O)C",
        "CS(=O)(=O)C",
        "FC(F)F",
        "ClCCl",
        # rings of every size, saturated heterocycles
        "C1CC1",
        "C1CCC1",
        "C1CCCC1",
        "C1CCCCC1",
        "C1CCCCCC1",
        "C1CCCCCCC1",
        "C1CC1C1CC1",
        "C1CCC(CC1)C1CCCCC1",
        "C1CO1",
        "C1CN1",
        "C1COC1",
        "C1CCOC1",
        "C1CCOCC1",
        "C1CCNC1",
        "C1CCNCC1",
        "C1CCSC1",
        "C1CCSCC1",
        "C1CNCCN1",
        "C1COCCO1",
        "C1COCCN1",
        "O1CCOCC1",
        "N1CCNCC1",
        "C1CCC2CCCCC2C1",
        "C1CCC2(CC1)CCCCC2",
        "C1CC2CCC1CC2",
        "C1CC2CCC(C1)C2",
        "C12CC3CC(C1)CC(C2)C3",
        "C1=CCCCC1",
        "C1=CC=CCC1",
        "C1CCC=CC1",
        "O=C1CCCCC1",
        "O=C1CCCC1",
        "O=C1CCCN1",
        "O=C1CCCO1",
        "O=C1NC(=O)NC(=O)C1",
        "CC1CCCCC1",
        "CC1CCCCC1C",
        "CC1(C)CCCCC1",
        # percent ring closures and digit reuse
        "C%10CCCCC%10",
        "C%12CCCC%12",
        "C1CCCCC1C1CCCCC1",
        "c1ccccc1c1ccccc1",
        "C%25CC%25",
        "c%11ccccc%11",
        "C1CC2CC1CC2C1CCC1",
        # explicit bond tokens in rings and aromatic colon bonds
        "C1=CC1",
        "C=1CCCCC=1",
        "C1CCCCC=1",
        "c1:c:c:c:c:c1",
        "c1:c:c:c:c:c:1",
        "c:1:c:c:c:c:c:1",
        # mixed aromatic plus aliphatic
        "Cc1cccc(C)c1C",
        "CCc1ccccc1CC",
        "c1ccc(CCCc2ccccc2)cc1",
        "Oc1cc(O)cc(O)c1",
        "Nc1ncnc2[nH]cnc12",
        "Nc1ncnc2n(C)cnc12",
        "O=c1cc[nH]c(=O)[nH]1",
        "Cn1ccnc1",
        "Cn1cccc1",
        "c1cn(C)cn1",
        "Cc1nc2ccccc2[nH]1",
        "c1nnc[nH]1",
        "c1cnn(C)c1",
        "c1conc1",
        "c1csnn1",
        "Cc1occc1C",
        "Cc1sccc1C",
        # heteroatom-rich chains
        "NCCO",
        "NCCN",
        "OCCO",
        "OCCCO",
        "SCCS",
        "NCCCN",
        "NC(CO)CO",
        "OCC(O)CO",
        "NCC(=O)NCC(=O)O",
        "CC(O)C(O)C(O)C",
        "CSCCC(N)C(=O)O",
        "NC(CCC(=O)O)C(=O)O",
        "OC(CN)CN",
        "ON=C(N)N",
        "CC(=NO)C",
        "CCON=C(C)C",
        "CN=C=S",
        "S=C=S",
        "O=C=O",
        "N#CSC",
        "CSC#N",
        "CN=C=O",
        # halogen-substituted drugs-like fragments
        "Clc1ccc(cc1)C(c1ccccc1)N1CCCC1",
        "Fc1ccc(cc1)C(=O)CCCN1CCC(O)CC1",
        "Clc1ccccc1-c1ccccc1",
        "FC(F)(F)Oc1ccccc1",
        "Brc1cccc2ccccc12",
        "ClCc1ccccc1",
        "FCC(F)(F)F",
        # larger branched and cyclic examples
        "CC(C)(C)OC(=O)NC(C)C(=O)O",
        "CC(C)(C)c1ccc(O)cc1",
        "CC(C)c1ccc(C)cc1",
        "CC1=CC(=O)CC(C)(C)C1",
        "CC1=CCC(CC1)C(C)C",
        "CC(C)C1CCC(C)CC1O",
        "CC1CCC2CC(C)CCC2C1",
        "OC1CCCCC1O",
        "NC1CCCCC1N",
        "O=C1OC(=O)c2ccccc12",
        "O=C1NC(=O)c2ccccc12",
        "c1ccc2c(c1)OCO2",
        "c1ccc2c(c1)OCCO2",
        "C1Cc2ccccc2C1",
        "C1CCc2ccccc2C1",
        "O1CCc2ccccc21",
        "C1Nc2ccccc2C1",
        "O=S1(=O)CCCC1",
        "O=P(O)(O)OCC",
        "CCOP(=O)(OCC)OCC",
        "CC(C)(C)P(C(C)(C)C)C(C)(C)C",
    ]
    corpus = [s for s in corpus if s]
    # deduplicate, preserving order
    seen = set()
    unique = []
    for s in corpus:
        if s not in seen:
            seen.add(s)
            unique.append(s)
    return unique


def main():
    out = os.path.join(
        os.path.dirname(os.path.abspath(__file__)),
        os.pardir,
        "tests",
        "data",
        "smiles_reference.csv",
    )
    corpus = build_corpus()
    if len(corpus) < 200:
        sys.exit(f"corpus too small: {len(corpus)}")
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, "w", newline="") as fh:
        writer = csv.DictWriter(
            fh,
            fieldnames=[
                "smiles",
                "num_atoms",
                "num_bonds",
                "num_rings",
                "aromatic_atoms",
                "total_hydrogens",
                "formal_charge",
            ],
        )
        writer.writeheader()
        for s in corpus:
            writer.writerow(attributes(s))
    print(f"wrote {len(corpus)} rows to {out}")


if __name__ == "__main__":
    main()
