#!/usr/bin/env python3
#
# MolForge - Copyright 2026 The MolForge Authors.
# SPDX-License-Identifier: Apache-2.0
#
"""Writes data/smiles_corpus.smi: known drug-like molecules plus seeded
random compositions of ring cores and substituents.

    python3 tools/make_corpus.py [--out data/smiles_corpus.smi] [--seed 7]
"""
import argparse
import random

KNOWN = [
    "CC(=O)Oc1ccccc1C(=O)O",                 # aspirin
    "CN1C=NC2=C1C(=O)N(C)C(=O)N2C",          # caffeine, Kekule form
    "Cn1cnc2c1c(=O)n(C)c(=O)n2C",            # caffeine, aromatic form
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",            # ibuprofen
    "CC(=O)Nc1ccc(O)cc1",                    # paracetamol
    "COc1ccc2cc(ccc2c1)C(C)C(=O)O",          # naproxen
    "OC(=O)c1ccccc1O",                       # salicylic acid
    "c1ccc2ccccc2c1",                        # naphthalene
    "c1ccc2cc3ccccc3cc2c1",                  # anthracene
    "c1ccncc1", "c1ccsc1", "c1ccoc1", "c1cc[nH]c1", "c1cn[nH]c1",
    "c1ncncn1", "c1ccc2[nH]ccc2c1", "c1ccc2ncccc2c1", "c1cnc2ccccc2n1",
    "C1CCCCC1", "C1CCNCC1", "C1COCCN1", "C1CCOC1", "C1CC1", "C1CCC1",
    "C1=CCC=CC1", "O=C1CCCCC1", "O=C1CCCN1", "O=C1OCCC1",
    "CCO", "CC(C)O", "CC(C)(C)O", "OCC(O)CO", "CCCCCCCCCCCCCCCC(=O)O",
    "CC=O", "C=C", "C#C", "C=CC=C", "CC#N", "N#CC#N", "C=O", "O=C=O",
    "CS(C)=O", "CS(=O)(=O)C", "OS(=O)(=O)O", "OP(=O)(O)O", "COP(=O)(OC)OC",
    "[NH4+]", "[OH-]", "[NH4+].[Cl-]", "C[N+](C)(C)C", "CC(=O)[O-]",
    "C[N+](=O)[O-]", "c1ccc(cc1)[N+](=O)[O-]", "[O-][N+](=O)c1ccc(N)cc1",
    "FC(F)(F)c1ccccc1", "ClC(Cl)Cl", "BrCCBr", "ICI", "FC(F)F",
    "CN(C)C=O", "CC(=O)N(C)C", "NC(=O)N", "NC(N)=O", "NC(=N)N",
    "CSC", "CCSCC", "c1ccc(cc1)S", "CC(C)(C)OC(=O)N", "O=C(O)CCC(=O)O",
    "NCC(=O)O", "CC(N)C(=O)O", "CC(C)C(N)C(=O)O", "NC(Cc1ccccc1)C(=O)O",
    "NC(Cc1c[nH]c2ccccc12)C(=O)O", "NC(Cc1cnc[nH]1)C(=O)O",
    "OC1C(O)C(O)C(O)C(O)C1O", "OCC1OC(O)C(O)C(O)C1O",
    "CC12CCC3C(CCC4=CC(=O)CCC34C)C1CCC2O",   # testosterone, stereo dropped
    "CN1CCCC1c1cccnc1",                      # nicotine
    "CN1CCC23C4Oc5c(O)ccc(CC1C2C=CC4O)c35",  # morphine skeleton
    "Clc1ccc(cc1)C(c1ccc(Cl)cc1)C(Cl)(Cl)Cl",
    "CC1=C(C(=O)OC)C(c2ccccc2[N+](=O)[O-])C(C(=O)OC)=C(C)N1",
    "COc1cc2c(cc1OC)C(=O)C(CC1CCN(Cc3ccccc3)CC1)C2",
    "CN(C)CCCN1c2ccccc2CCc2ccccc21",         # imipramine
    "OC(=O)CCCc1c[nH]c2ccccc12",
    "c1ccc(cc1)-c1ccccc1", "c1ccc(cc1)C=Cc1ccccc1", "c1ccc(cc1)C#Cc1ccccc1",
    "O=C(c1ccccc1)c1ccccc1", "c1ccc(cc1)Oc1ccccc1", "c1ccc(cc1)Nc1ccccc1",
    "C1CC2CCC1C2", "C1CC2CC1CC2", "C12C3C4C1C5C2C3C45",  # cubane
    "C%10CCCCC%10", "c%11ccccc%11-c%12ccccc%12",
    "C1CCC2(CC1)CCCC2", "C1CC1C1CC1", "OC(=O)C1=CC=CC=C1",
    "*CC*", "*CC(*)c1ccccc1", "*OCC*", "*CC(*)C(=O)OC", "*c1ccc(cc1)O*",
    "*CC(C)(*)C(=O)OC", "*NCCCCCCNC(=O)CCCCC(*)=O", "*C(F)(F)C(*)(F)F",
    "CCOC(=O)c1ccc(NC(C)=O)cc1", "CNC(=O)c1ccccc1", "CS(=O)(=O)Nc1ccccc1",
    "c1ccc2c(c1)[nH]c1ccccc12", "c1ccc2c(c1)oc1ccccc12", "c1ccc2c(c1)sc1ccccc12",
    "Cc1ccccc1C", "Cc1cccc(C)c1", "Cc1ccc(C)cc1", "Oc1ccc(O)cc1", "Nc1ccc(N)cc1",
    "CCN(CC)CC", "CCOCC", "COCCOC", "C1CCOCCOCCOCCOCCOC1",
    "S=C=S", "N#N", "O=O", "[H][H]", "[H]Cl", "Cl", "Br", "I", "F", "O", "N", "S", "P",
    "[CH3+]", "[CH3-]", "[CH2]", "[NH2-]", "[O-]C(=O)C(=O)[O-]", "[S-2]", "[Cl-].[NH4+]",
    "OC(=O)/C=C/C(=O)O".replace("/", ""), "CC(=O)C(C)=O", "O=CC=O",
]

# Substituents attach through their first atom.
SUBSTITUENTS = [
    "C", "CC", "CCC", "C(C)C", "C(C)(C)C", "O", "OC", "OCC", "N", "NC", "N(C)C",
    "F", "Cl", "Br", "I", "C(=O)O", "C(=O)OC", "C(=O)N", "C(=O)NC", "C#N",
    "[N+](=O)[O-]", "S(=O)(=O)N", "S(=O)(=O)C", "C(F)(F)F", "OC(F)(F)F",
    "C=C", "C#C", "C=O", "SC", "P(=O)(O)O", "C(=O)[O-]", "[NH3+]", "CO", "CN",
    "CC(=O)O", "NC(=O)C", "OC(=O)C", "CCN", "CCO", "C(O)C", "N=C=O",
]

# Cores with substitution slots {0}, {1}, {2}; ring labels are {r0}, {r1}.
CORES = [
    "c{r0}cc({0})ccc{r0}{1}",
    "c{r0}ccc({0})cc{r0}{1}",
    "c{r0}c({0})cccc{r0}{1}",
    "c{r0}cc({0})cc({1})c{r0}{2}",
    "c{r0}cnc({0})cc{r0}{1}",
    "c{r0}cc({0})ncc{r0}",
    "c{r0}cc({0})sc{r0}{1}",
    "c{r0}cc({0})oc{r0}",
    "c{r0}cc({0})[nH]c{r0}",
    "c{r0}nc({0})ncc{r0}{1}",
    "C{r0}CC({0})CCC{r0}{1}",
    "C{r0}CN({0})CCC{r0}",
    "C{r0}CN({0})CCN{r0}{1}",
    "C{r0}COCCN{r0}{0}",
    "C{r0}CC({0})C{r0}",
    "C{r0}CC{r0}{0}",
    "O=C{r0}CCC({0})C{r0}",
    "O=C{r0}N({0})CCC{r0}",
    "c{r0}ccc{r1}c(c{r0})cc({0})c{r1}",
    "c{r0}ccc{r1}[nH]c({0})cc{r1}c{r0}",
    "c{r0}ccc{r1}nc({0})ccc{r1}c{r0}",
    "C({0})C({1})C{2}",
    "C({0})=C{1}",
    "N({0})C(=O){1}",
    "O({0})C(=O)C{1}",
    "C({0})(C{1})O{2}",
    "S(=O)(=O)({0})N{1}",
    "C({0})N{1}",
    "c{r0}cc(-c{r1}ccc({0})cc{r1})ccc{r0}{1}",
    "c{r0}ccc(cc{r0})C(=O)N{0}",
]


class Labels:
    """Hands out ring-closure labels, switching to %nn notation past 9."""

    def __init__(self, rng):
        self.next = 10 if rng.random() < 0.15 else 1

    def take(self):
        n = self.next
        self.next += 1
        return str(n) if n < 10 else "%" + str(n)


# Cores usable as substituents: the first atom must keep a free valence.
ATTACHABLE = [c for c in CORES if not c.startswith(("O", "S"))]


def substituent(rng, labels, depth):
    if depth < 2 and rng.random() < 0.2:
        return fragment(rng, labels, depth + 1, ATTACHABLE)
    return rng.choice(SUBSTITUENTS)


def fragment(rng, labels, depth, cores=CORES):
    core = rng.choice(cores)
    ring = {f"r{i}": labels.take() for i in range(2) if "{r%d}" % i in core}
    slots = {}
    for i in range(3):
        if "{%d}" % i not in core:
            continue
        slots[str(i)] = substituent(rng, labels, depth) if rng.random() < 0.75 else ""
    text = core
    for k, v in ring.items():
        text = text.replace("{" + k + "}", v)
    for k, v in slots.items():
        text = text.replace("{" + k + "}", v)
    # Empty branches are not valid SMILES.
    return text.replace("()", "")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data/smiles_corpus.smi")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--count", type=int, default=1000)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    seen = set()
    out = []
    for s in KNOWN:
        if s not in seen:
            seen.add(s)
            out.append(s)
    while len(out) < args.count:
        labels = Labels(rng)
        if rng.random() < 0.05:
            # Polymer repeat unit with a pendant group.
            s = "*CC(*)" + fragment(rng, labels, 1, ATTACHABLE)
        else:
            s = fragment(rng, labels, 0)
        if rng.random() < 0.05:
            s += "." + rng.choice(["Cl", "[Cl-]", "O", "[NH4+]", "CCO"])
        if s not in seen:
            seen.add(s)
            out.append(s)
    with open(args.out, "w") as f:
        f.write("# generated by tools/make_corpus.py --seed %d\n" % args.seed)
        for s in out[: args.count]:
            f.write(s + "\n")


if __name__ == "__main__":
    main()
