#!/usr/bin/env python3
#
# MolForge - Copyright 2026 The MolForge Authors.
# SPDX-License-Identifier: Apache-2.0
#
"""Builds the desk-scale benchmark under data/desk/.

Writes a 200-molecule building-block stock, a 40-template library, 50
question records (40 drug, 10 polymer), a property oracle table, a scripted
language model and an engine config. Reference routes are planned with the
built `molforge` binary, so run this after a build:

    python3 tools/make_desk_data.py --molforge build/tools/molforge
"""
import argparse
import json
import os
import random
import subprocess

# Attachment is through the first atom.
ARYL = [
    "c1ccccc1", "c1ccc(C)cc1", "c1ccc(F)cc1", "c1ccc(Cl)cc1", "c1ccc(OC)cc1",
    "c1ccc(C#N)cc1", "c1cccc(C)c1", "c1ccc(C(F)(F)F)cc1", "c1ccncc1", "c1cccnc1",
    "c1ccsc1", "c1ccc2ccccc2c1", "c1ccc(Br)cc1", "c1cc(C)cc(C)c1", "c1ccc(OCC)cc1",
]
ALKYL = [
    "C", "CC", "CCC", "CC(C)C", "CCCC", "CC1CC1", "C1CCCCC1", "Cc1ccccc1",
    "CCc1ccccc1", "CCOC", "CC(C)(C)C", "CCN(C)C", "C1CCOCC1", "CCCCC",
    "Cc1ccc(F)cc1",
]

TEMPLATES = [
    ("amide_coupling", "[C:1](=[O:2])[N:3]", ["[C:1](=[O:2])O", "[N:3]"], 0.30),
    ("esterification", "[C:1](=[O:2])[O:3][C:4]", ["[C:1](=[O:2])O", "[O:3][C:4]"], 0.20),
    ("williamson_ether", "[c:1][O:2][CH2:3][C:4]", ["[c:1][OH:2]", "Br[CH2:3][C:4]"], 0.10),
    ("aryl_amination", "[c:1][NH:2][C:3]", ["[c:1]Br", "[NH2:2][C:3]"], 0.10),
    ("reductive_amination", "[CH2:1]([c:4])[NH:2][C:3]", ["[CH1:1]([c:4])=O", "[NH2:2][C:3]"], 0.10),
    ("sulfonamide", "[S:1](=[O:2])(=[O:3])[NH:4][C:5]", ["[S:1](=[O:2])(=[O:3])Cl", "[NH2:4][C:5]"], 0.10),
    ("lactamization", "[C;R:1](=[O:2])[NH;R:3]", ["[C:1](=[O:2])O.[NH2:3]"], 0.05),
    ("friedel_crafts_acylation", "[c:1][C:2](=[O:3])[CH3:4]", ["[cH:1]", "Cl[C:2](=[O:3])[CH3:4]"], 0.05),
    ("grignard_addition", "[C:1][CH:2]([OH:3])[c:4]", ["[C:1][CH:2]=[O:3]", "Br[c:4]"], 0.05),
    ("nitrile_hydrolysis", "[C:4][C:1](=[O:2])[OH:3]", ["[C:4][C:1]#N"], 0.05),
    ("amide_aniline", "[C:1](=[O:2])[NH:3][c:4]", ["[C:1](=[O:2])O", "[NH2:3][c:4]"], 0.25),
    ("amide_acyl_chloride", "[C:1](=[O:2])[N:3]", ["[C:1](=[O:2])Cl", "[N:3]"], 0.15),
    ("ester_acyl_chloride", "[C:1](=[O:2])[O:3][C:4]", ["[C:1](=[O:2])Cl", "[O:3][C:4]"], 0.10),
    ("aryl_ester", "[C:1](=[O:2])[O:3][c:4]", ["[C:1](=[O:2])O", "[OH:3][c:4]"], 0.10),
    ("williamson_alkyl", "[C:1][O:2][CH2:3][C:4]", ["[C:1][OH:2]", "Br[CH2:3][C:4]"], 0.05),
    ("n_benzylation", "[C:1][NH:2][CH2:3][c:4]", ["[C:1][NH2:2]", "Br[CH2:3][c:4]"], 0.05),
    ("reductive_amination_alkyl", "[CH2:1]([C:4])[NH:2][C:3]", ["[CH1:1]([C:4])=O", "[NH2:2][C:3]"], 0.05),
    ("sulfonamide_aniline", "[S:1](=[O:2])(=[O:3])[NH:4][c:5]", ["[S:1](=[O:2])(=[O:3])Cl", "[NH2:4][c:5]"], 0.10),
    ("ullmann_biaryl", "[c:1]-[c:2]", ["[c:1]Br", "[c:2]I"], 0.05),
    ("sonogashira", "[c:1][C:2]#[C:3]", ["[c:1]I", "[CH:2]#[C:3]"], 0.05),
    ("heck", "[c:1][CH:2]=[CH:3][C:4]", ["[c:1]Br", "[CH2:2]=[CH:3][C:4]"], 0.05),
    ("snar_ether", "[c:1][O:2][c:3]", ["[c:1]F", "[OH:2][c:3]"], 0.05),
    ("aryl_thioether", "[c:1][S:2][C:3]", ["[c:1]Br", "[SH:2][C:3]"], 0.05),
    ("alkyl_thioether", "[C:1][S:2][CH2:3][C:4]", ["[C:1][SH:2]", "Br[CH2:3][C:4]"], 0.05),
    ("nitro_reduction", "[c:1][NH2:2]", ["[c:1][N+:2](=O)[O-]"], 0.05),
    ("boc_deprotection", "[C:1][NH2:2]", ["[C:1][NH:2]C(=O)OC(C)(C)C"], 0.05),
    ("ester_hydrolysis", "[C:1](=[O:2])[OH:3]", ["[C:1](=[O:2])[O:3]C"], 0.05),
    ("ketone_reduction", "[C:1][CH:2]([OH:3])[C:4]", ["[C:1][C:2](=[O:3])[C:4]"], 0.05),
    ("nitrile_reduction", "[C:1][CH2:2][NH2:3]", ["[C:1][C:2]#[N:3]"], 0.05),
    ("alkene_hydrogenation", "[C:1][CH2:2][CH2:3][C:4]", ["[C:1][CH:2]=[CH:3][C:4]"], 0.02),
    ("carbamate", "[C:1][NH:2][C:3](=[O:4])[O:5][C:6]", ["[C:1][NH2:2]", "Cl[C:3](=[O:4])[O:5][C:6]"], 0.05),
    ("sulfonate_ester", "[S:1](=[O:2])(=[O:3])[O:4][C:5]", ["[S:1](=[O:2])(=[O:3])Cl", "[OH:4][C:5]"], 0.05),
    ("tertiary_amide", "[C:1](=[O:2])[N:3]([C:4])[C:5]", ["[C:1](=[O:2])O", "[NH:3]([C:4])[C:5]"], 0.10),
    ("buchwald_secondary", "[c:1][N:2]([C:3])[C:4]", ["[c:1]Br", "[NH:2]([C:3])[C:4]"], 0.05),
    ("aroyl_ester", "[c:4][C:1](=[O:2])[O:3][C:5]", ["[c:4][C:1](=[O:2])O", "[OH:3][C:5]"], 0.15),
    ("aroyl_amide", "[c:4][C:1](=[O:2])[NH:3][C:5]", ["[c:4][C:1](=[O:2])O", "[NH2:3][C:5]"], 0.15),
    ("acetylation", "[CH3:1][C:2](=[O:3])[NH:4][c:5]", ["[CH3:1][C:2](=[O:3])Cl", "[NH2:4][c:5]"], 0.05),
    ("aromatic_chlorination", "[c:1][Cl:2]", ["[cH:1]", "Cl[Cl:2]"], 0.02),
    ("aromatic_bromination", "[c:1][Br:2]", ["[cH:1]", "Br[Br:2]"], 0.02),
    ("alcohol_oxidation", "[C:1][CH:2]=[O:3]", ["[C:1][CH2:2][OH:3]"], 0.02),
]

CATEGORICAL = ["HIV", "BBBP", "BACE"]
CONTINUOUS = ["CO2Perm", "N2Perm", "O2Perm", "FFV", "TC"]

POLYMERS = [
    "*CC(*)c1ccccc1", "*CC(*)C(=O)OC", "*CC(C)(*)C(=O)OC", "*OCC*", "*CC(*)C#N",
    "*CC(*)Cl", "*CC(*)OC(C)=O", "*c1ccc(cc1)O*", "*C(F)(F)C(*)(F)F", "*CC(*)c1ccc(F)cc1",
]


def stock_molecules(rng):
    out = []

    def add(s):
        if s not in out:
            out.append(s)

    for r in ARYL + ALKYL:
        add("OC(=O)" + r)       # acids
    for r in ALKYL:
        add("N" + r)            # aliphatic amines
        add("O" + r)            # alcohols
    for r in ARYL:
        add("N" + r)            # anilines
        add("O" + r)            # phenols
        add("Br" + r)           # aryl bromides
        add("O=C" + r)          # aryl aldehydes
    for r in ALKYL[:10]:
        add("BrC" + r)          # alkyl bromides
    for r in ARYL[:8] + ALKYL[:4]:
        add("ClS(=O)(=O)" + r)  # sulfonyl chlorides
        add("ClC(=O)" + r)      # acyl chlorides
    for s in ["Nc1ccc(cc1)C(=O)O", "Nc1cccc(c1)C(=O)O", "NCC(=O)O", "NCCC(=O)O",
              "Oc1ccc(cc1)C(=O)O", "NCc1ccc(cc1)C(=O)O", "CC(=O)O", "CCO", "CO",
              "CC(C)O", "I" + ARYL[0], "N#Cc1ccccc1", "CC#N", "N#CCc1ccccc1"]:
        add(s)
    fillers = ["C", "CC", "CCC", "CCCC", "c1ccccc1", "c1ccncc1", "C1CCCCC1", "C1CCNCC1",
               "C1COCCN1", "CC(C)=O", "CCOC(C)=O", "CS(C)=O", "CN(C)C=O", "ClCCl", "CCOCC",
               "C1CCOC1", "Cc1ccccc1", "Oc1ccccc1O", "c1ccc2ccccc2c1", "CC(=O)C"]
    for s in fillers:
        if len(out) >= 200:
            break
        add(s)
    while len(out) < 200:
        add("C" * (len(out) % 7 + 5) + "O")
        add("C" * (len(out) % 9 + 5) + "N")
    return out[:200]


def drug_targets(rng):
    """(smiles, family) pairs assembled forward from stock pieces."""
    targets = []
    for _ in range(8):
        targets.append(("O=C(" + rng.choice(ARYL + ALKYL) + ")N" + rng.choice(ALKYL), "amide"))
    for _ in range(5):
        targets.append(("O=C(" + rng.choice(ARYL) + ")O" + rng.choice(ALKYL[:6]), "ester"))
    for _ in range(4):
        targets.append(("O(" + rng.choice(ARYL) + ")C" + rng.choice(ALKYL[:10]), "ether"))
    for _ in range(4):
        targets.append(("N(" + rng.choice(ARYL) + ")" + rng.choice(ALKYL[:10]), "aryl_amine"))
    for _ in range(4):
        targets.append(("C(" + rng.choice(ARYL) + ")N" + rng.choice(ALKYL), "benzyl_amine"))
    for _ in range(3):
        targets.append(("O=S(=O)(" + rng.choice(ARYL[:8]) + ")N" + rng.choice(ALKYL), "sulfonamide"))
    # Two steps: the amino ester intermediate is not in stock.
    for _ in range(6):
        ro = rng.choice(["C", "CC", "CCC", "CC(C)C"])
        aniline = rng.choice(["c1ccc(cc1)C(=O)O", "c1cccc(c1)C(=O)O"])
        targets.append(("O=C(" + rng.choice(ARYL + ALKYL[:6]) + ")N" + aniline + ro, "amide_ester"))
    # Already purchasable.
    for s in ["Nc1ccc(cc1)C(=O)O", "OC(=O)c1ccccc1"]:
        targets.append((s, "in_stock"))
    # No disconnection leads back to the stock.
    for s in ["c1ccc2c(c1)oc1ccccc12", "CC1=CC(=O)C=CC1=O", "c1ccc2c(c1)[nH]c1ccccc12",
              "C1CC2CCC1C2"]:
        targets.append((s, "unreachable"))
    return targets


def plan_route(molforge, config, smiles):
    res = subprocess.run([molforge, "plan", smiles, "--config", config],
                         capture_output=True, text=True)
    if res.returncode == 0:
        return json.loads(res.stdout)
    if res.returncode == 2:
        return None
    raise RuntimeError("plan failed for %s: %s" % (smiles, res.stderr))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--molforge", default="build/tools/molforge")
    parser.add_argument("--out", default="data/desk")
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    os.makedirs(args.out, exist_ok=True)

    with open(os.path.join(args.out, "stock.smi"), "w") as f:
        f.write("# desk benchmark building blocks\n")
        for s in stock_molecules(rng):
            f.write(s + "\n")
    with open(os.path.join(args.out, "templates.jsonl"), "w") as f:
        for tid, product, reactants, prior in TEMPLATES:
            f.write(json.dumps({"id": tid, "product": product, "reactants": reactants,
                                "prior": prior}) + "\n")
    config = os.path.join(args.out, "engine.toml")
    with open(config, "w") as f:
        f.write("# Desk benchmark engine config. Paths are relative to this file.\n"
                "seed = 0\n\n[diffusion]\ndenoiser = \"oracle\"\n\n"
                "[planner]\nstock = \"stock.smi\"\ntemplates = \"templates.jsonl\"\n\n"
                "[orchestrator]\nlm = \"lm.json\"\n")
    with open(os.path.join(args.out, "lm.json"), "w") as f:
        script = ("Here is a molecule that fits the request . <design_start> "
                  "The synthesis plan follows . <retro_start> "
                  "That completes the design .").split()
        json.dump({"tokens": script, "hidden_dim": 16,
                   "heuristic": [0.5, 0.2, 0.15, 0.1, 0.05]}, f, indent=1)
        f.write("\n")

    records, oracle = [], []
    for i, (smiles, family) in enumerate(drug_targets(rng)):
        props = {name: rng.randint(0, 1) for name in CATEGORICAL}
        route = plan_route(args.molforge, config, smiles)
        steps = route.get("steps", 0) if route else None
        question = ("Design a drug-like molecule with " +
                    " ".join("%s: %d" % kv for kv in props.items()) +
                    " and plan its synthesis.")
        if route is None:
            answer = "The molecule %s fits the request but no route from stock was found." % smiles
        elif steps == 0:
            answer = "The molecule %s fits the request and is available in stock." % smiles
        else:
            answer = ("The molecule %s fits the request and can be made in %d steps from "
                      "purchasable building blocks." % (smiles, steps))
        records.append({"id": "drug%02d" % i, "question": question,
                        "properties": {k: {"value": v, "kind": "categorical"} for k, v in props.items()},
                        "ref_smiles": smiles, "ref_route": route, "answer": answer,
                        "category": "drug", "family": family})
        oracle.append({"canonical_key": smiles, "properties": props})
    for i, smiles in enumerate(POLYMERS):
        props = {name: round(rng.uniform(0.1, 5.0), 4) for name in CONTINUOUS}
        question = ("Design a polymer repeat unit with " +
                    " ".join("%s: %g" % kv for kv in props.items()) + ".")
        answer = "The repeat unit %s has two attachment points and matches the targets." % smiles
        records.append({"id": "poly%02d" % i, "question": question,
                        "properties": {k: {"value": v, "kind": "continuous"} for k, v in props.items()},
                        "ref_smiles": smiles, "ref_route": None, "answer": answer,
                        "category": "material"})
        oracle.append({"canonical_key": smiles,
                       "properties": {k: round(v * rng.uniform(0.9, 1.1), 4) for k, v in props.items()}})

    with open(os.path.join(args.out, "bench.jsonl"), "w") as f:
        for r in records:
            f.write(json.dumps(r) + "\n")
    with open(os.path.join(args.out, "oracle.jsonl"), "w") as f:
        for o in oracle:
            f.write(json.dumps(o) + "\n")
    routed = sum(1 for r in records if r["ref_route"] is not None)
    print("%d records, %d with routes" % (len(records), routed))


if __name__ == "__main__":
    main()
