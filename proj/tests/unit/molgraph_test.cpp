//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <string>

#include "molforge/chemio.h"
#include "molforge/error.h"
#include "molforge/molgraph.h"
#include "test_util.h"

namespace molforge {
namespace {
// Plain byte-wise FNV-1a, checked against published vectors below.
std::uint64_t fnv1a_bytes(const std::vector<unsigned char> &bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b: bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void push_le(std::vector<unsigned char> &out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

MolecularGraph random_graph(std::mt19937_64 &rng, int n) {
  static constexpr Element kElements[] = { Element::C, Element::N,
                                           Element::O, Element::S,
                                           Element::P, Element::F };
  std::vector<Atom> atoms(n);
  for (Atom &a: atoms) {
    a.element = kElements[rng() % 6];
    a.hydrogens = static_cast<int>(rng() % 3);
  }
  std::vector<Bond> bonds;
  for (int i = 1; i < n; ++i) {
    bonds.push_back({ static_cast<int>(rng() % i), i,
                      static_cast<BondOrder>(1 + rng() % 3) });
  }
  const int extra = static_cast<int>(rng() % 4);
  for (int k = 0; k < extra; ++k) {
    const int a = static_cast<int>(rng() % n), b = static_cast<int>(rng() % n);
    if (a == b)
      continue;
    bool dup = false;
    for (const Bond &bd: bonds)
      dup |= (bd.begin == a && bd.end == b) || (bd.begin == b && bd.end == a);
    if (!dup)
      bonds.push_back({ a, b, static_cast<BondOrder>(1 + rng() % 3) });
  }
  return MolecularGraph(atoms, bonds);
}
}  // namespace

TEST_CASE("graph construction rejects structural violations") {
  const Atom c { Element::C, 0, false, 0 };
  CHECK_THROWS_AS(MolecularGraph({}, {}), InvalidGraph);
  CHECK_THROWS_AS(MolecularGraph({ c }, { { 0, 0, BondOrder::kSingle } }),
                  InvalidGraph);
  CHECK_THROWS_AS(MolecularGraph({ c, c }, { { 0, 2, BondOrder::kSingle } }),
                  InvalidGraph);
  CHECK_THROWS_AS(MolecularGraph({ c, c }, { { 0, 1, BondOrder::kSingle },
                                             { 1, 0, BondOrder::kDouble } }),
                  InvalidGraph);
  CHECK_THROWS_AS(MolecularGraph({ c, c }, { { 0, 1, BondOrder::kAromatic } }),
                  InvalidGraph);
  CHECK_THROWS_AS(MolecularGraph({ { Element::Star, 1, false, 0 } }, {}),
                  InvalidGraph);
  CHECK_THROWS_AS(MolecularGraph({ { Element::C, 0, false, -1 } }, {}),
                  InvalidGraph);
}

TEST_CASE("valence verdicts") {
  SUBCASE("pentavalent carbon") {
    std::vector<Atom> atoms(6, Atom { Element::C, 0, false, 3 });
    atoms[0].hydrogens = 0;
    std::vector<Bond> bonds;
    for (int i = 1; i <= 5; ++i)
      bonds.push_back({ 0, i, BondOrder::kSingle });
    const ValenceReport r = check_valence(MolecularGraph(atoms, bonds));
    CHECK_FALSE(r.valid);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].atom == 0);
    CHECK(r.violations[0].used == 5);
  }
  SUBCASE("common molecules are valid") {
    for (const char *s: { "c1ccccc1", "O=C(O)C", "c1ccncc1", "c1cc[nH]c1",
                          "c1ccoc1", "c1ccsc1", "O=c1cccc[nH]1", "C[N+](C)(C)C",
                          "[O-]C(=O)C", "CS(=O)(=O)C", "OP(=O)(O)O",
                          "c1ccc2ccccc2c1", "*CC(*)c1ccccc1", "C#N", "[NH4+]" }) {
      INFO(s);
      CHECK(check_valence(parse_smiles(s)).valid);
    }
  }
  SUBCASE("hand-counted hydrogens") {
    // Acetic acid: CH3 (3), C (0), =O (0), OH (1).
    const MolecularGraph acid = parse_smiles("O=C(O)C");
    CHECK(acid.atom(0).hydrogens == 0);
    CHECK(acid.atom(1).hydrogens == 0);
    CHECK(acid.atom(2).hydrogens == 1);
    CHECK(acid.atom(3).hydrogens == 3);
    const MolecularGraph pyridine = parse_smiles("c1ccncc1");
    CHECK(pyridine.atom(3).hydrogens == 0);
    CHECK(pyridine.atom(0).hydrogens == 1);
    const MolecularGraph pyrrole = parse_smiles("c1cc[nH]c1");
    CHECK(pyrrole.atom(3).hydrogens == 1);
    const MolecularGraph naphthalene = parse_smiles("c1ccc2ccccc2c1");
    CHECK(naphthalene.atom(3).hydrogens == 0);
  }
  SUBCASE("attachment point needs exactly one bond") {
    const Atom star { Element::Star, 0, false, 0 };
    const Atom c { Element::C, 0, false, 2 };
    CHECK_FALSE(check_valence(MolecularGraph({ star }, {})).valid);
    CHECK_FALSE(check_valence(MolecularGraph({ star, c, c },
                                             { { 0, 1, BondOrder::kSingle },
                                               { 0, 2, BondOrder::kSingle } }))
                    .valid);
  }
}

TEST_CASE("valence agrees with a bond-order summation oracle") {
  // Neutral, non-aromatic graphs: the verdict reduces to sum(order) + H
  // against the largest table entry.
  const std::map<Element, int> max_valence = {
    { Element::C, 4 }, { Element::N, 3 }, { Element::O, 2 },
    { Element::S, 6 }, { Element::P, 5 }, { Element::F, 1 },
  };
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 3000; ++trial) {
    const MolecularGraph g =
        random_graph(rng, 1 + static_cast<int>(rng() % 10));
    bool expected = true;
    for (int i = 0; i < g.atom_count(); ++i) {
      int sum = g.atom(i).hydrogens;
      for (const Neighbor &nb: g.neighbors(i))
        sum += static_cast<int>(g.bond(nb.bond).order);
      expected &= sum <= max_valence.at(g.atom(i).element);
    }
    REQUIRE(check_valence(g).valid == expected);
    REQUIRE(check_valence(g).valid == check_valence(g).valid);
  }
}

TEST_CASE("ring perception") {
  CHECK(perceive_rings(parse_smiles("CCO")).cyclomatic_number == 0);
  const RingInfo benzene = perceive_rings(parse_smiles("c1ccccc1"));
  CHECK(benzene.cyclomatic_number == 1);
  CHECK(benzene.rings.size() == 1);

  const RingInfo naph = perceive_rings(parse_smiles("c1ccc2ccccc2c1"));
  REQUIRE(naph.rings.size() == 2);
  CHECK(naph.rings[0].size() == 6);
  CHECK(naph.rings[1].size() == 6);

  // Cubane: 12 edges, 8 vertices, five four-membered basis rings.
  const RingInfo cubane =
      perceive_rings(parse_smiles("C12C3C4C1C5C2C3C45"));
  CHECK(cubane.cyclomatic_number == 5);
  REQUIRE(cubane.rings.size() == 5);
  for (const auto &ring: cubane.rings)
    CHECK(ring.size() == 4);

  const RingInfo spiro = perceive_rings(parse_smiles("C1CCC2(CC1)CC2"));
  CHECK(spiro.rings.size() == 2);

  SUBCASE("cycle count equals |E| - |V| + components") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
      const MolecularGraph g =
          random_graph(rng, 2 + static_cast<int>(rng() % 12));
      int components = 0;
      g.component_labels(&components);
      const RingInfo info = perceive_rings(g);
      const int expected = g.bond_count() - g.atom_count() + components;
      REQUIRE(info.cyclomatic_number == expected);
      REQUIRE(static_cast<int>(info.rings.size()) == expected);
    }
  }
}

TEST_CASE("canonical key") {
  CHECK(canonical_key(parse_smiles("OCC")) == canonical_key(parse_smiles("CCO")));
  CHECK(canonical_key(parse_smiles("CCO")) != canonical_key(parse_smiles("CCN")));
  CHECK(canonical_key(parse_smiles("c1ccccc1C"))
        == canonical_key(parse_smiles("Cc1ccccc1")));
  CHECK(canonical_key(parse_smiles("CC(=O)O"))
        != canonical_key(parse_smiles("CC(O)=O.C")));
  // Same degree sequence, different graphs.
  CHECK(canonical_key(parse_smiles("C1CCCCC1.C1CCCCC1"))
        != canonical_key(parse_smiles("C1CCCCCCCCCCC1")));

  SUBCASE("permutation stress") {
    std::mt19937_64 rng(3);
    for (const char *s: { "CC(C)Cc1ccc(cc1)C(C)C(=O)O", "C12C3C4C1C5C2C3C45",
                          "c1ccc2ccccc2c1", "C1CC2CCC1CC2" }) {
      const MolecularGraph g = parse_smiles(s);
      const std::string key = canonical_key(g);
      std::set<std::string> keys;
      for (int k = 0; k < 200; ++k)
        keys.insert(
            canonical_key(g.permuted(test::random_permutation(g.atom_count(), rng))));
      CHECK(keys.size() == 1);
      CHECK(*keys.begin() == key);
    }
  }

  SUBCASE("ranks are a permutation") {
    const CanonicalLabeling lab = canonical_labeling(parse_smiles("CC(C)(C)O"));
    std::vector<int> sorted = lab.rank;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < static_cast<int>(sorted.size()); ++i)
      CHECK(sorted[i] == i);
  }
}

TEST_CASE("hash_tuple is FNV-1a over a length-prefixed little-endian tuple") {
  CHECK(fnv1a_bytes({}) == 0xcbf29ce484222325ULL);
  CHECK(fnv1a_bytes({ 'a' }) == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a_bytes({ 'f', 'o', 'o', 'b', 'a', 'r' }) == 0x85944171f73967e8ULL);

  const std::vector<std::int64_t> tuple = { 6, 2, 0, 3, 0, -1 };
  std::vector<unsigned char> bytes;
  push_le(bytes, tuple.size());
  for (std::int64_t v: tuple)
    push_le(bytes, static_cast<std::uint64_t>(v));
  CHECK(hash_tuple(tuple) == fnv1a_bytes(bytes));
}

TEST_CASE("morgan fingerprint") {
  SUBCASE("radius 0 on ethanol has three environments") {
    const auto envs = morgan_environments(parse_smiles("CCO"), 0);
    CHECK(envs.size() == 3);
    CHECK(std::set<std::uint64_t>(envs.begin(), envs.end()).size() == 3);
    // Round 0 identifiers are hashes of (element, degree, charge, H, ring,
    // aromatic); CH3 carbon: (C, 1, 0, 3, 0, 0).
    const std::int64_t methyl[] = { static_cast<std::int64_t>(Element::C),
                                    1, 0, 3, 0, 0 };
    CHECK(std::count(envs.begin(), envs.end(), hash_tuple(methyl)) == 1);
  }
  SUBCASE("benzene: more rounds never remove bits") {
    const MolecularGraph g = parse_smiles("c1ccccc1");
    CHECK(morgan_fingerprint(g, 2).count() >= morgan_fingerprint(g, 0).count());
    CHECK(morgan_fingerprint(g, 0).count() == 1);
  }
  SUBCASE("attachment points are excluded") {
    CHECK(morgan_environments(parse_smiles("*CC*"), 1).size() == 4);
  }
  SUBCASE("permutation invariance") {
    std::mt19937_64 rng(5);
    for (const char *s: { "CC(C)Cc1ccc(cc1)C(C)C(=O)O", "O=C(O)c1ccccc1O",
                          "*CC(*)c1ccccc1" }) {
      const MolecularGraph g = parse_smiles(s);
      const Fingerprint fp = morgan_fingerprint(g);
      for (int k = 0; k < 50; ++k) {
        const auto p = test::random_permutation(g.atom_count(), rng);
        REQUIRE(morgan_fingerprint(g.permuted(p)) == fp);
      }
    }
  }
  SUBCASE("argument checks") {
    const MolecularGraph g = parse_smiles("CC");
    CHECK_THROWS(morgan_fingerprint(g, 2, 1000));
    CHECK_THROWS(morgan_fingerprint(g, -1, 2048));
    const Atom c { Element::C, 0, false, 4 };
    CHECK_THROWS_AS(morgan_fingerprint(MolecularGraph({ c, c },
                                                      { { 0, 1,
                                                          BondOrder::kSingle } })),
                    InvalidGraph);
  }
}

TEST_CASE("tanimoto") {
  Fingerprint a(2048, 2), b(2048, 2), empty(2048, 2);
  for (int bit: { 1, 2, 3 })
    a.set(bit);
  for (int bit: { 2, 3, 4 })
    b.set(bit);
  CHECK(tanimoto(a, b) == 0.5);
  CHECK(tanimoto(a, a) == 1.0);
  CHECK(tanimoto(empty, empty) == 1.0);
  Fingerprint c(2048, 2);
  c.set(100);
  CHECK(tanimoto(a, c) == 0.0);
  CHECK_THROWS_AS(tanimoto(a, Fingerprint(1024, 2)), LengthMismatch);
  CHECK_THROWS_AS(tanimoto(a, Fingerprint(2048, 1)), LengthMismatch);

  std::mt19937_64 rng(9);
  for (int k = 0; k < 200; ++k) {
    Fingerprint x(256, 2), y(256, 2);
    for (int i = 0; i < 40; ++i) {
      x.set(static_cast<int>(rng() % 256));
      y.set(static_cast<int>(rng() % 256));
    }
    const double s = tanimoto(x, y);
    REQUIRE(s == tanimoto(y, x));
    REQUIRE(s >= 0.0);
    REQUIRE(s <= 1.0);
  }
}

TEST_CASE("descriptors") {
  const Descriptors benzene = descriptors(parse_smiles("c1ccccc1"));
  CHECK(benzene.ring_count == 1);
  CHECK(benzene.aromatic_ring_count == 1);
  CHECK(descriptors(parse_smiles("*CC*")).attachment_points == 2);

  // Periodic-table sums: CH4 = 12.011 + 4 * 1.008.
  CHECK(descriptors(parse_smiles("C")).molecular_weight
        == doctest::Approx(12.011 + 4 * 1.008).epsilon(1e-12));
  CHECK(descriptors(parse_smiles("C")).molecular_weight
        == doctest::Approx(16.04).epsilon(0.01 / 16.04));
  CHECK(descriptors(parse_smiles("c1ccccc1")).molecular_weight
        == doctest::Approx(6 * 12.011 + 6 * 1.008));

  CHECK(descriptors(parse_smiles("CCCC")).rotatable_bonds == 1);
  CHECK(descriptors(parse_smiles("CCO")).rotatable_bonds == 0);
  CHECK(descriptors(parse_smiles("c1ccccc1-c1ccccc1")).rotatable_bonds == 1);

  const Descriptors phenol = descriptors(parse_smiles("Oc1ccccc1"));
  CHECK(phenol.h_donors == 1);
  CHECK(phenol.h_acceptors == 1);
  CHECK(descriptors(parse_smiles("C[N+](C)(C)C")).h_acceptors == 0);

  CHECK(descriptors(parse_smiles("c1ccc2ccccc2c1")).aromatic_ring_count == 2);
  CHECK(descriptors(parse_smiles("C1CCCCC1")).aromatic_ring_count == 0);

  std::mt19937_64 rng(13);
  const MolecularGraph ibu = parse_smiles("CC(C)Cc1ccc(cc1)C(C)C(=O)O");
  const Descriptors d = descriptors(ibu);
  for (int k = 0; k < 30; ++k) {
    const Descriptors e =
        descriptors(ibu.permuted(test::random_permutation(ibu.atom_count(), rng)));
    CHECK(e.molecular_weight == doctest::Approx(d.molecular_weight));
    CHECK(e.rotatable_bonds == d.rotatable_bonds);
    CHECK(e.ring_count == d.ring_count);
    CHECK(e.h_donors == d.h_donors);
    CHECK(e.h_acceptors == d.h_acceptors);
  }
}

TEST_CASE("graph JSON round trip") {
  const MolecularGraph g = parse_smiles("c1ccccc1C(=O)[O-]");
  const nlohmann::json j = graph_to_json(g);
  CHECK(j["bonds"][0][2] == 1.5);
  const MolecularGraph back = graph_from_json(j);
  CHECK(back.atoms() == g.atoms());
  CHECK(back.bond_count() == g.bond_count());
  CHECK_THROWS_AS(graph_from_json(nlohmann::json::parse(
                      R"({"atoms":[{"el":"Xx","charge":0,"aromatic":false,"h":0}],"bonds":[]})")),
                  InvalidGraph);
}

}  // namespace molforge
