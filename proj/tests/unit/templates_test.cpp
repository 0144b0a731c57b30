//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <fstream>
#include <nlohmann/json.hpp>
#include <random>

#include "molforge/chemio.h"
#include "molforge/error.h"
#include "molforge/templates.h"
#include "template_oracle.h"
#include "test_util.h"

namespace molforge {
namespace {
RetroTemplate ester_template() {
  const std::vector<std::string> reactants = { "[C:1](=[O:2])O",
                                               "[O:3][C:4]" };
  return make_template("esterification", "[C:1](=[O:2])[O:3][C:4]",
                       reactants);
}

std::vector<std::string> keys_of(std::initializer_list<const char *> smiles) {
  std::vector<MolecularGraph> graphs;
  for (const char *s: smiles)
    graphs.push_back(parse_smiles(s));
  return reactant_set_keys(graphs);
}
}  // namespace

TEST_CASE("find_matches examples") {
  CHECK(find_matches(parse_pattern("[c]"), parse_smiles("c1ccccc1")).size()
        == 6);
  const auto ester = find_matches(parse_pattern("[C:1](=[O:2])[O:3]"),
                                  parse_smiles("CCOC(C)=O"));
  REQUIRE(ester.size() == 1);
  // Atoms of CCOC(C)=O: 0 C, 1 C, 2 O, 3 C, 4 C, 5 O.
  CHECK(ester[0].atoms == std::vector<int> { 3, 5, 2 });
  CHECK(find_matches(parse_pattern("[N]"), parse_smiles("CCO")).empty());

  const auto limited =
      find_matches(parse_pattern("cc"), parse_smiles("c1ccccc1"), 3);
  REQUIRE(limited.size() == 3);
  CHECK(limited[0].atoms == std::vector<int> { 0, 1 });
  CHECK(limited[1].atoms == std::vector<int> { 0, 5 });
  CHECK(limited[2].atoms == std::vector<int> { 1, 0 });
}

TEST_CASE("atom constraints") {
  const MolecularGraph g = parse_smiles("OCc1ccccc1");
  CHECK(find_matches(parse_pattern("[C;!R]"), g).size() == 1);
  CHECK(find_matches(parse_pattern("[C;R]"), g).empty());
  CHECK(find_matches(parse_pattern("[c;D3]"), g).size() == 1);
  CHECK(find_matches(parse_pattern("[cH1]"), g).size() == 5);
  CHECK(find_matches(parse_pattern("[OH1]"), g).size() == 1);
  CHECK(find_matches(parse_pattern("[A]"), g).size() == 2);
  CHECK(find_matches(parse_pattern("[a]"), g).size() == 6);
  CHECK(find_matches(parse_pattern("[#8]"), g).size() == 1);
  CHECK(find_matches(parse_pattern("[O-]"), parse_smiles("CC(=O)[O-]")).size()
        == 1);
  CHECK(find_matches(parse_pattern("C~O"), parse_smiles("CC(=O)[O-]")).size()
        == 2);
  CHECK(find_matches(parse_pattern("C=O"), parse_smiles("CC(=O)[O-]")).size()
        == 1);
}

TEST_CASE("match budget") {
  const MolecularGraph big = parse_smiles("C1CCCCCCCCCCCCCCCCCCC1");
  CHECK_THROWS_AS(find_matches(parse_pattern("CCCCCC"), big,
                               std::numeric_limits<std::size_t>::max(), 50),
                  MatchBudgetExceeded);
  CHECK(find_matches(parse_pattern("CCCCCC"), big).size() == 40);
}

TEST_CASE("matcher agrees with brute-force enumeration") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const MolecularGraph g = test::random_molecule(rng, 10);
    const PatternGraph p = test::random_pattern(rng, 4);
    const auto expected = test::brute_force_matches(p, g);
    const auto got = find_matches(p, g);
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i)
      REQUIRE(got[i].atoms == expected[i]);
  }
}

TEST_CASE("template construction") {
  const std::vector<std::string> one = { "[C:1]O" };
  CHECK_THROWS_AS(make_template("x", "[C:1]C", one), TemplateUnsupported);
  const std::vector<std::string> unknown = { "[C:1][O:9]" };
  CHECK_THROWS_AS(make_template("x", "[C:1]", unknown), TemplateUnsupported);
  const std::vector<std::string> twice = { "[C:1]", "[C:1]" };
  CHECK_THROWS_AS(make_template("x", "[C:1]", twice), TemplateUnsupported);
  const std::vector<std::string> wildcard = { "[C:1]*" };
  CHECK_THROWS_AS(make_template("x", "[C:1]", wildcard), TemplateUnsupported);
  const std::vector<std::string> recursive = { "[C:1]" };
  CHECK_THROWS_AS(make_template("x", "[C$(C):1]", recursive),
                  UnsupportedFeature);
  CHECK_THROWS_AS(make_template("x", "[C:1]", one, 0.0), TemplateUnsupported);
}

TEST_CASE("template file errors name the line") {
  const auto path = test::temp_path("bad_templates.jsonl");
  {
    std::ofstream out(path);
    out << R"({"id":"ok","product":"[C:1]","reactants":["[C:1]"],"prior":0.5})"
        << "\n\n"
        << R"({"id":"bad","product":"[C:1][C,N:2]","reactants":["[C:1]"]})"
        << "\n";
  }
  try {
    load_templates(path);
    FAIL("expected an error");
  } catch (const UnsupportedFeature &e) {
    CHECK(e.position() == 7);
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }
}

TEST_CASE("ester hydrolysis retro") {
  const RetroTemplate t = ester_template();
  const MolecularGraph product = parse_smiles("CCOC(C)=O");
  const auto sets = apply_retro(t, product);
  REQUIRE(sets.size() == 1);
  CHECK(reactant_set_keys(sets[0]) == keys_of({ "CCO", "CC(=O)O" }));

  const std::vector<MolecularGraph> good = { parse_smiles("CC(=O)O"),
                                             parse_smiles("OCC") };
  CHECK(validate_forward(t, good, product));
  const std::vector<MolecularGraph> swapped = { parse_smiles("CC(=O)O"),
                                                parse_smiles("CO") };
  CHECK_FALSE(validate_forward(t, swapped, product));
  CHECK_FALSE(validate_forward(t, good, parse_smiles("CCN")));
  CHECK(apply_retro(t, parse_smiles("CCN")).empty());
}

TEST_CASE("apply_retro dedupes symmetric matches and keeps valid graphs") {
  // Diethyl carbonate would match the ester core twice, both rewrites are
  // the same proposal.
  const RetroTemplate t = ester_template();
  const auto sets = apply_retro(t, parse_smiles("CCOC(=O)OCC"));
  REQUIRE(sets.size() == 1);
  for (const ReactantSet &set: sets) {
    for (const MolecularGraph &g: set)
      CHECK(check_valence(g).valid);
  }
  // Determinism.
  const auto again = apply_retro(t, parse_smiles("CCOC(=O)OCC"));
  REQUIRE(again.size() == sets.size());
  CHECK(reactant_set_keys(again[0]) == reactant_set_keys(sets[0]));
}

TEST_CASE("hand-built template triples round trip") {
  std::ifstream in(test::fixture_dir() / "template_triples.jsonl");
  REQUIRE(in.good());
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    const auto &tj = j["template"];
    const std::vector<std::string> reactant_text = tj["reactants"];
    const RetroTemplate t =
        make_template(tj["id"], tj["product"].get<std::string>(),
                      reactant_text, tj["prior"]);
    INFO(t.id);
    const MolecularGraph product = parse_smiles(j["product"].get<std::string>());
    std::vector<MolecularGraph> reactants;
    for (const auto &s: j["reactants"])
      reactants.push_back(parse_smiles(s.get<std::string>()));

    const auto sets = apply_retro(t, product);
    bool found = false;
    for (const ReactantSet &set: sets) {
      for (const MolecularGraph &g: set)
        CHECK(check_valence(g).valid);
      found |= reactant_set_keys(set) == reactant_set_keys(reactants);
    }
    if (!found) {
      for (const ReactantSet &set: sets) {
        std::string text;
        for (const MolecularGraph &g: set)
          text += write_smiles(g) + " ";
        MESSAGE("got: " << text);
      }
    }
    CHECK(found);
    CHECK(validate_forward(t, reactants, product));
    ++count;
  }
  CHECK(count == 10);
}

}  // namespace molforge
