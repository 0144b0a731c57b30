//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "molforge/chemio.h"
#include "molforge/error.h"
#include "molforge/retro.h"
#include "network_oracle.h"
#include "test_util.h"

namespace molforge {
namespace {
// Every expansion yields one reaction with two never-seen molecules, none in
// stock: the search can only end on a budget.
class EndlessSource: public ExpansionSource {
public:
  std::vector<ReactionProposal> expand(const MolecularGraph &, std::string_view,
                                       int, ExpansionStats &stats) override {
    ++stats.predictor_calls;
    ReactantSet set = { test::distinct_molecule(next_),
                        test::distinct_molecule(next_ + 1) };
    next_ += 2;
    return { { "split", 0.5, std::move(set) } };
  }
  bool validate(const std::string &, std::span<const MolecularGraph>,
                const MolecularGraph &) override {
    return true;
  }

private:
  int next_ = 1;
};

class CountingHeuristic: public HeuristicProvider {
public:
  std::array<double, kHeuristicChoices>
  probabilities(const HeuristicQuery &q) override {
    ++calls;
    seen.push_back(q);
    return { 0.2, 0.2, 0.2, 0.2, 0.2 };
  }
  int calls = 0;
  std::vector<HeuristicQuery> seen;
};

// Deterministic pseudo-random choice probabilities per (target, step).
class HashedHeuristic: public HeuristicProvider {
public:
  std::array<double, kHeuristicChoices>
  probabilities(const HeuristicQuery &q) override {
    std::seed_seq seq(q.target.begin(), q.target.end());
    std::mt19937_64 rng(seq);
    rng.discard(q.step);
    std::array<double, kHeuristicChoices> p {};
    double sum = 0;
    for (double &v: p) {
      v = 1.0 + static_cast<double>(rng() % 100);
      sum += v;
    }
    for (double &v: p)
      v /= sum;
    return p;
  }
};

struct FixtureNetwork {
  TemplateLibrary library =
      TemplateLibrary::load(test::fixture_dir() / "retro_templates.jsonl");
  TablePredictor table =
      TablePredictor::load(test::fixture_dir() / "retro_table.jsonl");
  Stock stock = Stock::load(test::fixture_dir() / "retro_stock.smi");
};

const char *const kTarget = "CCOC(=O)c1ccc(NC(C)=O)cc1";
}  // namespace

TEST_CASE("heuristic score") {
  CHECK(heuristic_score(std::vector<double> { 1, 0, 0, 0, 0 }) == 0.0);
  CHECK(heuristic_score(std::vector<double> { 0, 0, 0, 0, 1 }) == 7.0);
  CHECK(std::abs(heuristic_score(std::vector<double>(5, 0.2)) - 3.0) <= 1e-12);
  for (int i = 0; i < 5; ++i) {
    std::vector<double> delta(5, 0.0);
    delta[i] = 1.0;
    CHECK(heuristic_score(delta) == kChoiceScores[i]);
  }
  CHECK_THROWS_AS(heuristic_score(std::vector<double> { 0.5, 0.5 }),
                  BadDistribution);
  CHECK_THROWS_AS(heuristic_score(std::vector<double> { 0.5, 0.5, 0.5, 0, 0 }),
                  BadDistribution);
  CHECK_THROWS_AS(heuristic_score(std::vector<double> { 1.5, -0.5, 0, 0, 0 }),
                  BadDistribution);

  HeuristicQuery q { "CCO", 2, std::string("esterification"),
                     std::vector<std::string> { "CCO", "CC(=O)O" } };
  const std::string prompt = heuristic_prompt(q);
  CHECK(prompt.find("Estimate remaining steps for the target CCO") == 0);
  CHECK(prompt.find("Current step 2") != std::string::npos);
  CHECK(prompt.find("esterification") != std::string::npos);
  CHECK(prompt.find("CCO, CC(=O)O") != std::string::npos);
  CHECK(prompt.find("E. All require extensive multi-step synthesis")
        != std::string::npos);
}

TEST_CASE("frontier ordering") {
  std::map<int, double> cost = { { 0, 2.0 }, { 1, 1.5 } };
  Frontier f([&](int n) { return cost.at(n); });
  f.insert(0, 2.0);
  f.insert(1, 1.5);
  CHECK(f.select_next() == 1);

  Frontier ties(nullptr);
  ties.insert(7, 1.0);
  ties.insert(3, 1.0);
  CHECK(ties.select_next() == 7);
  CHECK(ties.select_next() == 3);
  CHECK_THROWS_AS(ties.select_next(), EmptyFrontier);

  // A cheaper node added later wins.
  cost[2] = 0.5;
  f.insert(2, 0.5);
  CHECK(f.select_next() == 2);
  CHECK(f.select_next() == 0);

  // Stale cached values are refreshed before they can win.
  std::map<int, double> live = { { 0, 1.0 }, { 1, 2.0 } };
  Frontier lazy([&](int n) { return live.at(n); });
  lazy.insert(0, 1.0);
  lazy.insert(1, 2.0);
  live[0] = 3.0;
  CHECK(*lazy.min_j() == 2.0);
  CHECK(lazy.select_next() == 1);
}

TEST_CASE("expansion on the ester fixture") {
  FixtureNetwork net;
  TemplateExpansion source(net.table, net.library);
  ZeroHeuristic zero;
  Planner planner(parse_smiles("CCOC(C)=O"), net.stock, source, zero);
  const int next = planner.select_next();
  CHECK(next == 0);
  const auto reactions = planner.expand(next);
  REQUIRE(reactions.size() == 1);
  const ReactionNode &r = planner.tree().reaction(reactions[0]);
  CHECK(r.template_id == "esterification");
  CHECK(r.cost == doctest::Approx(0.2231435513).epsilon(1e-9));
  CHECK(r.children.size() == 2);
  const int changed[] = { next };
  CHECK(planner.update_solved(changed));
  const Route route = planner.extract_route();
  CHECK(route.steps == 1);
  CHECK(route.total_cost == doctest::Approx(-std::log(0.8)));
}

TEST_CASE("solved flags follow AND/OR semantics") {
  // Target 0 with reactions: r0 -> {1 (stock)}, r1 -> {1 (stock), 2}.
  test::SyntheticNetwork net(
      3,
      { { { "r0", 0.1, { 1 } }, { "r1", 0.9, { 1, 2 } } }, {}, {} },
      { 1 });
  ZeroHeuristic zero;
  Planner planner(net.molecule(0), net.stock(), net, zero);
  const int root = planner.select_next();
  planner.expand(root);
  const int changed[] = { root };
  CHECK(planner.update_solved(changed));
  const SearchTree &tree = planner.tree();
  // Reactions come back sorted by probability: r1 first.
  CHECK(tree.reaction(0).template_id == "r1");
  CHECK_FALSE(tree.reaction(0).solved);  // {stock, non-stock}
  CHECK(tree.reaction(1).solved);        // {stock}
  CHECK(tree.molecule(0).solved);        // OR over one solved child
  CHECK(planner.frontier().size() == 1);
}

TEST_CASE("plan degenerate cases") {
  FixtureNetwork net;
  TemplateExpansion source(net.table, net.library);
  ZeroHeuristic zero;

  SUBCASE("target in stock") {
    const PlanResult r = plan(parse_smiles("OCC"), net.stock, source, zero);
    REQUIRE(r.ok());
    CHECK(r.route->steps == 0);
    CHECK(r.stats.iterations == 0);
    CHECK(route_to_json(*r.route)
          == nlohmann::json { { "target", "CCO" }, { "in_stock", true } });
  }
  SUBCASE("nothing applies") {
    const PlanResult r = plan(parse_smiles("c1ccccc1"), net.stock, source, zero);
    REQUIRE_FALSE(r.ok());
    CHECK(r.failure->reason == FailureReason::kExhausted);
    CHECK(r.stats.iterations == 1);
    const auto j = plan_result_to_json(r);
    CHECK(j["failure"]["reason"] == "exhausted");
    CHECK(j["failure"]["predictor_calls"] == 1);
  }
  SUBCASE("proposals that never apply still count") {
    TablePredictor bogus;
    bogus.add(parse_smiles("CCN"), { { "esterification", 0.9, std::nullopt },
                                     { "no_such_template", 0.5, std::nullopt } });
    TemplateExpansion src(bogus, net.library);
    const PlanResult r = plan(parse_smiles("CCN"), net.stock, src, zero);
    CHECK_FALSE(r.ok());
    CHECK(r.stats.expansion.proposals == 2);
    CHECK(r.stats.expansion.proposals_dropped == 2);
  }
}

TEST_CASE("two-step fixture route") {
  FixtureNetwork net;
  TemplateExpansion source(net.table, net.library);
  ZeroHeuristic zero;
  const PlanResult r = plan(parse_smiles(kTarget), net.stock, source, zero);
  REQUIRE(r.ok());
  const auto steps = route_reactions(*r.route);
  REQUIRE(steps.size() == 2);
  CHECK(steps[0]->template_id == "amide_coupling");
  CHECK(steps[1]->template_id == "esterification");
  CHECK(r.route->total_cost
        == doctest::Approx(-std::log(0.6) - std::log(0.7)).epsilon(1e-12));
  CHECK(route_leaves_in_stock(r.route->root, net.stock));

  // Literal first-route mode on the same network stops as soon as the root
  // is solved, which here is also the cheap route.
  PlannerConfig first;
  first.stop_at_first_route = true;
  const PlanResult quick =
      plan(parse_smiles(kTarget), net.stock, source, zero, first);
  REQUIRE(quick.ok());
  CHECK(quick.stats.iterations <= r.stats.iterations);

  // JSON round trip.
  const nlohmann::json j = route_to_json(*r.route);
  CHECK(j["steps"] == 2);
  CHECK(j["reaction"]["template_id"] == "amide_coupling");
  const Route back = route_from_json(j);
  CHECK(route_to_json(back) == j);
  CHECK(back.total_cost == doctest::Approx(r.route->total_cost));
}

TEST_CASE("first solved route is not always the cheapest") {
  // r_expensive solves the root at once; the cheap route needs one more
  // expansion. Stopping at the first route would return cost -ln 0.01.
  test::SyntheticNetwork net(
      4,
      { { { "r_expensive", 0.01, { 3 } }, { "r_cheap", 0.9, { 1 } } },
        { { "r_leaf", 0.9, { 2 } } },
        {},
        {} },
      { 2, 3 });
  ZeroHeuristic zero;
  const PlanResult best = plan(net.molecule(0), net.stock(), net, zero);
  REQUIRE(best.ok());
  CHECK(best.route->total_cost == net.optimum(0));
  CHECK(route_reactions(*best.route)[0]->template_id == "r_cheap");

  PlannerConfig first;
  first.stop_at_first_route = true;
  const PlanResult literal = plan(net.molecule(0), net.stock(), net, zero, first);
  REQUIRE(literal.ok());
  CHECK(route_reactions(*literal.route)[0]->template_id == "r_expensive");
}

TEST_CASE("route tie-break prefers the lower template id") {
  test::SyntheticNetwork net(
      3, { { { "b_route", 0.5, { 1 } }, { "a_route", 0.5, { 2 } } }, {}, {} },
      { 1, 2 });
  ZeroHeuristic zero;
  const PlanResult r = plan(net.molecule(0), net.stock(), net, zero);
  REQUIRE(r.ok());
  CHECK(route_reactions(*r.route)[0]->template_id == "a_route");
}

TEST_CASE("cycle guard prunes reactions that need an ancestor") {
  // 0 -> {1}, 1 -> {0} (cycle) and 1 -> {2 (stock)}.
  class Cyclic: public ExpansionSource {
  public:
    std::vector<ReactionProposal> expand(const MolecularGraph &g,
                                         std::string_view, int,
                                         ExpansionStats &) override {
      const std::string key = canonical_key(g);
      if (key == canonical_key(test::distinct_molecule(0)))
        return { { "down", 0.5, { test::distinct_molecule(1) } } };
      return { { "back", 0.9, { test::distinct_molecule(0) } },
               { "leaf", 0.5, { test::distinct_molecule(2) } } };
    }
    bool validate(const std::string &, std::span<const MolecularGraph>,
                  const MolecularGraph &) override {
      return true;
    }
  } source;
  Stock stock;
  stock.insert(test::distinct_molecule(2));
  ZeroHeuristic zero;
  const PlanResult r = plan(test::distinct_molecule(0), stock, source, zero);
  REQUIRE(r.ok());
  CHECK(r.stats.reactions_pruned == 1);
  CHECK(r.route->steps == 2);
}

TEST_CASE("budgets") {
  Stock empty;
  ZeroHeuristic zero;
  SUBCASE("iterations") {
    EndlessSource source;
    const PlanResult r = plan(test::distinct_molecule(0), empty, source, zero);
    REQUIRE_FALSE(r.ok());
    CHECK(r.failure->reason == FailureReason::kBudgetIterations);
    CHECK(r.stats.iterations == 300);
    CHECK(r.stats.expansions == 300);
  }
  SUBCASE("wall clock") {
    EndlessSource source;
    double now = 0.0;
    // Each clock read advances one second.
    const Clock fake = [&] { return now++; };
    const PlanResult r = plan(test::distinct_molecule(0), empty, source, zero,
                              {}, {}, fake);
    REQUIRE_FALSE(r.ok());
    CHECK(r.failure->reason == FailureReason::kBudgetTime);
    CHECK(r.stats.iterations < 300);
    CHECK(r.stats.iterations == 29);
  }
  SUBCASE("defaults") {
    const PlannerConfig c;
    CHECK(c.k == 50);
    CHECK(c.max_iterations == 300);
    CHECK(c.max_seconds == 30.0);
    CHECK_FALSE(c.stop_at_first_route);
  }
  SUBCASE("top-k reaches the predictor") {
    class Spy: public Predictor {
    public:
      std::vector<Proposal> propose(const MolecularGraph &, std::string_view,
                                    int k) override {
        seen_k = k;
        return {};
      }
      int seen_k = 0;
    } spy;
    TemplateLibrary none;
    TemplateExpansion source(spy, none);
    plan(parse_smiles("CCN"), empty, source, zero);
    CHECK(spy.seen_k == 50);
  }
}

TEST_CASE("heuristic is cached per node key and step") {
  FixtureNetwork net;
  TemplateExpansion source(net.table, net.library);
  CountingHeuristic counting;
  const PlanResult r = plan(parse_smiles(kTarget), net.stock, source, counting);
  REQUIRE(r.ok());
  CHECK(counting.calls == r.stats.heuristic_calls);
  std::set<std::pair<std::string, int>> distinct;
  for (const HeuristicQuery &q: counting.seen)
    distinct.insert({ q.target, q.step });
  CHECK(distinct.size() == counting.seen.size());
  // The root query has no template; children carry their parent reaction.
  CHECK_FALSE(counting.seen[0].template_id.has_value());
  REQUIRE(counting.seen.size() > 1);
  CHECK(counting.seen[1].template_id.has_value());
  CHECK(counting.seen[1].reactants->size() == 2);
}

TEST_CASE("random networks: optimality, flag consistency, determinism") {
  std::mt19937_64 rng(99);
  ZeroHeuristic zero;
  HashedHeuristic hashed;
  PlannerConfig roomy;
  roomy.max_iterations = 100000;
  roomy.max_seconds = 1e9;
  for (int trial = 0; trial < 25; ++trial) {
    test::SyntheticNetwork net = test::SyntheticNetwork::random(rng, 120);
    INFO("trial " << trial);

    // Step the loop by hand and audit the incremental flags each time.
    Planner planner(net.molecule(0), net.stock(), net, zero, roomy);
    for (int it = 0; it < 200 && !planner.frontier().empty(); ++it) {
      const int next = planner.select_next();
      planner.expand(next);
      const int changed[] = { next };
      planner.update_solved(changed);
      const auto flags = planner.tree().recompute_solved();
      const int nm = planner.tree().molecule_count();
      for (int m = 0; m < nm; ++m)
        REQUIRE(planner.tree().molecule(m).solved == flags[m]);
      for (int r = 0; r < planner.tree().reaction_count(); ++r)
        REQUIRE(planner.tree().reaction(r).solved == flags[nm + r]);
    }

    const PlanResult r = plan(net.molecule(0), net.stock(), net, zero, roomy);
    REQUIRE(r.ok());
    CHECK(r.route->total_cost == net.optimum(0));
    CHECK(route_leaves_in_stock(r.route->root, net.stock()));

    const PlanResult again = plan(net.molecule(0), net.stock(), net, zero, roomy);
    CHECK(route_to_json(*again.route) == route_to_json(*r.route));

    // A bounded heuristic changes the order, never whether a route is found.
    const PlanResult guided = plan(net.molecule(0), net.stock(), net, hashed,
                                   roomy);
    REQUIRE(guided.ok());
    CHECK(route_leaves_in_stock(guided.route->root, net.stock()));
  }
}

TEST_CASE("extract_route rejects a reaction that fails validation") {
  class Liar: public test::SyntheticNetwork {
  public:
    using SyntheticNetwork::SyntheticNetwork;
    bool validate(const std::string &, std::span<const MolecularGraph>,
                  const MolecularGraph &) override {
      return false;
    }
  } net(2, { { { "r", 0.5, { 1 } } }, {} }, { 1 });
  ZeroHeuristic zero;
  CHECK_THROWS_AS(plan(net.molecule(0), net.stock(), net, zero), Inconsistent);
}

TEST_CASE("stock and library loading") {
  const Stock stock = Stock::load(test::fixture_dir() / "retro_stock.smi");
  CHECK(stock.size() == 3);
  CHECK(stock.contains(parse_smiles("OC(C)=O")));
  CHECK_FALSE(stock.contains(parse_smiles("CCCO")));
  CHECK_THROWS(Stock::load("/nonexistent/stock.smi"));

  const auto bad = test::temp_path("bad_stock.smi");
  {
    std::ofstream out(bad);
    out << "CCO\nC1CC\n";
  }
  try {
    Stock::load(bad);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }

  TemplateLibrary lib =
      TemplateLibrary::load(test::fixture_dir() / "retro_templates.jsonl");
  CHECK(lib.size() == 2);
  CHECK(lib.find("esterification") != nullptr);
  CHECK(lib.find("nope") == nullptr);
  CHECK_THROWS_AS(lib.add(*lib.find("esterification")), TemplateUnsupported);

  TablePredictor table;
  CHECK_THROWS_AS(table.add(parse_smiles("CC"), { { "x", 1.5, std::nullopt } }),
                  PredictorUnavailable);
  table.add(parse_smiles("CC"), { { "low", 0.1, std::nullopt },
                                  { "high", 0.9, std::nullopt } });
  const auto got = table.propose(parse_smiles("CC"), "", 1);
  REQUIRE(got.size() == 1);
  CHECK(got[0].template_id == "high");
  CHECK(table.propose(parse_smiles("CCC"), "", 50).empty());
}

TEST_CASE("template prior predictor") {
  TemplateLibrary lib =
      TemplateLibrary::load(test::fixture_dir() / "retro_templates.jsonl");
  TemplatePriorPredictor predictor(lib);
  const auto both = predictor.propose(parse_smiles(kTarget), "", 50);
  REQUIRE(both.size() == 2);
  CHECK(both[0].template_id == "amide_coupling");
  CHECK(both[0].prob == 0.3);
  CHECK(predictor.propose(parse_smiles("CCOC(C)=O"), "", 50).size() == 1);
  CHECK(predictor.propose(parse_smiles(kTarget), "", 1).size() == 1);
}

}  // namespace molforge
