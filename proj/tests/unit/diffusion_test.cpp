//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <cmath>
#include <random>

#include "diffusion_oracle.h"
#include "molforge/chemio.h"
#include "molforge/diffusion.h"
#include "molforge/error.h"
#include "test_util.h"

namespace molforge {
namespace {
DiffusionModel small_model(int steps, TransitionFamily family =
                                          TransitionFamily::kUniform) {
  DiffusionConfig config;
  config.family = family;
  config.steps = steps;
  config.tokenization.max_nodes = 12;
  if (family == TransitionFamily::kMarginal) {
    config.node_marginal = { 0.55, 0.1, 0.1, 0.05, 0.04,
                             0.04, 0.04, 0.04, 0.02, 0.02 };
    config.edge_marginal = { 0.8, 0.1, 0.04, 0.01, 0.05 };
  }
  return make_diffusion_model(config);
}

double max_abs_diff(const Matrix &a, const Matrix &b) {
  double d = 0;
  for (std::size_t k = 0; k < a.data.size(); ++k)
    d = std::max(d, std::abs(a.data[k] - b.data[k]));
  return d;
}

// Denoiser that always returns fixed rows, ignoring the condition.
class FixedDenoiser: public Denoiser {
public:
  FixedDenoiser(std::vector<double> node, std::vector<double> edge)
      : node_(std::move(node)), edge_(std::move(edge)) { }
  TokenDistributions predict(const TokenGraph &xt, int,
                             const ConditionVector &) override {
    TokenDistributions p;
    p.nodes.assign(xt.n_nodes, node_);
    p.edges.assign(xt.edges.size(), edge_);
    return p;
  }

private:
  std::vector<double> node_, edge_;
};
}  // namespace

TEST_CASE("two-step uniform product by hand") {
  const TransitionModel m(NoiseSchedule::custom({ 0.5, 0.5 }),
                          TransitionFamily::kUniform, 2);
  // Q = [[0.75, 0.25], [0.25, 0.75]], Q^2 = [[0.625, 0.375], [0.375, 0.625]].
  CHECK(m.step(1)(0, 0) == doctest::Approx(0.75));
  CHECK(m.cumulative(2)(0, 0) == doctest::Approx(0.625).epsilon(1e-12));
  CHECK(m.cumulative(2)(0, 1) == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(m.cumulative(2)(1, 0) == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(m.cumulative(2)(1, 1) == doctest::Approx(0.625).epsilon(1e-12));
}

TEST_CASE("schedules") {
  for (int steps: { 1, 2, 10, 50, 200, 500, 1000 }) {
    for (const NoiseSchedule &s:
         { NoiseSchedule::linear(steps), NoiseSchedule::cosine(steps) }) {
      INFO(to_string(s.family()) << " T=" << steps);
      CHECK(s.steps() == steps);
      CHECK(s.alpha_bar(0) == 1.0);
      for (int t = 1; t <= steps; ++t) {
        REQUIRE(s.beta(t) > 0.0);
        REQUIRE(s.beta(t) < 1.0);
        REQUIRE(s.alpha_bar(t) < s.alpha_bar(t - 1));
      }
      CHECK(s.alpha_bar(steps) <= 0.01);
    }
  }
  // Linear endpoints at T = 1000 are the unscaled 1e-4 and 0.02.
  const NoiseSchedule lin = NoiseSchedule::linear(1000);
  CHECK(lin.beta(1) == doctest::Approx(1e-4));
  CHECK(lin.beta(1000) == doctest::Approx(0.02));
  CHECK_THROWS(NoiseSchedule::custom({ 0.5, 1.0 }));
  CHECK_THROWS(NoiseSchedule::custom({}));
  CHECK_THROWS(NoiseSchedule::linear(0));
}

TEST_CASE("transition matrices are stochastic and compose") {
  std::vector<double> m = { 0.5, 0.3, 0.2 };
  for (const NoiseSchedule &s:
       { NoiseSchedule::linear(100), NoiseSchedule::cosine(100) }) {
    for (const TransitionModel &model:
         { TransitionModel(s, TransitionFamily::kUniform, 7),
           TransitionModel(s, TransitionFamily::kMarginal, 3, m) }) {
      for (int t = 1; t <= model.steps(); ++t) {
        for (const Matrix *q: { &model.step(t), &model.cumulative(t) }) {
          for (int i = 0; i < q->n; ++i) {
            double sum = 0;
            for (double v: q->row(i)) {
              REQUIRE(v >= 0.0);
              sum += v;
            }
            REQUIRE(std::abs(sum - 1.0) <= 1e-9);
          }
        }
        REQUIRE(max_abs_diff(model.cumulative(t),
                             model.cumulative(t - 1) * model.step(t))
                <= 1e-9);
      }
    }
  }
}

TEST_CASE("uniform cumulative matrix has the closed form") {
  // Q̄^t = ᾱ_t I + (1 - ᾱ_t)/F 11ᵀ for the uniform family.
  const NoiseSchedule s = NoiseSchedule::cosine(60);
  const TransitionModel model(s, TransitionFamily::kUniform, 5);
  for (int t: { 1, 7, 30, 60 }) {
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        const double expected =
            (1.0 - s.alpha_bar(t)) / 5 + (i == j ? s.alpha_bar(t) : 0.0);
        REQUIRE(model.cumulative(t)(i, j)
                == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("marginal family converges to its stationary distribution") {
  const std::vector<double> m = { 0.6, 0.25, 0.1, 0.05 };
  const TransitionModel model(NoiseSchedule::linear(200),
                              TransitionFamily::kMarginal, 4, m);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j)
      CHECK(model.cumulative(200)(i, j) == doctest::Approx(m[j]).epsilon(1e-4));
  }
  CHECK_THROWS_AS(TransitionModel(NoiseSchedule::linear(5),
                                  TransitionFamily::kMarginal, 4),
                  BadDistribution);
  CHECK_THROWS_AS(TransitionModel(NoiseSchedule::linear(5),
                                  TransitionFamily::kMarginal, 2,
                                  std::vector<double> { 0.5, 0.6 }),
                  BadDistribution);
  CHECK_THROWS_AS(TransitionModel(NoiseSchedule::linear(5),
                                  TransitionFamily::kMarginal, 2,
                                  std::vector<double> { 1.0, 0.0 }),
                  BadDistribution);
  Matrix bad(2);
  bad(0, 0) = 0.7;
  bad(0, 1) = 0.7;
  bad(1, 1) = 1.0;
  CHECK_THROWS_AS(TransitionModel::from_matrices({ bad }, { 0.5, 0.5 }),
                  BadDistribution);
}

TEST_CASE("posterior") {
  const TransitionModel model(NoiseSchedule::cosine(20),
                              TransitionFamily::kUniform, 4);
  SUBCASE("t = 1 collapses to x0") {
    for (int xt = 0; xt < 4; ++xt) {
      for (int x0 = 0; x0 < 4; ++x0) {
        const auto p = posterior(model, xt, x0, 1);
        for (int k = 0; k < 4; ++k)
          CHECK(p[k] == (k == x0 ? 1.0 : 0.0));
      }
    }
    const TransitionModel two(NoiseSchedule::custom({ 0.5 }),
                              TransitionFamily::kUniform, 2);
    CHECK(posterior(two, 0, 1, 1) == std::vector<double> { 0.0, 1.0 });
  }
  SUBCASE("rows are normalized") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 200; ++trial) {
      const int t = 1 + static_cast<int>(rng() % 20);
      std::vector<double> x0(4);
      double s = 0;
      for (double &v: x0) {
        v = static_cast<double>(rng() % 100);
        s += v;
      }
      if (s == 0)
        continue;
      for (double &v: x0)
        v /= s;
      const auto p = posterior(model, static_cast<int>(rng() % 4), x0, t);
      double sum = 0;
      for (double v: p)
        sum += v;
      REQUIRE(std::abs(sum - 1.0) <= 1e-9);
    }
  }
  SUBCASE("matches Bayes over enumerated chains") {
    std::mt19937_64 rng(2);
    for (int f = 2; f <= 5; ++f) {
      for (int steps = 1; steps <= 10; ++steps) {
        for (int chain = 0; chain < 10; ++chain) {
          std::vector<Matrix> qs;
          for (int t = 0; t < steps; ++t)
            qs.push_back(test::random_stochastic(rng, f));
          const TransitionModel m = TransitionModel::from_matrices(
              qs, std::vector<double>(f, 1.0 / f));
          for (int t = 1; t <= steps; ++t) {
            for (int xt = 0; xt < f; ++xt) {
              for (int x0 = 0; x0 < f; ++x0) {
                const auto oracle = test::enumerated_posterior(qs, xt, x0, t);
                const auto got = posterior(m, xt, x0, t);
                for (int k = 0; k < f; ++k)
                  REQUIRE(std::abs(got[k] - oracle[k]) <= 1e-9);
              }
            }
          }
        }
      }
    }
  }
  SUBCASE("inconsistent inputs have no mass") {
    const TransitionModel frozen(NoiseSchedule::custom({ 0.0 }),
                                 TransitionFamily::kUniform, 3);
    CHECK_THROWS_AS(posterior(frozen, 0, 1, 1), ZeroMass);
    CHECK_THROWS_AS(posterior(model, 0, 1, 0), TimestepOutOfRange);
  }
}

TEST_CASE("guidance") {
  const std::vector<double> cond = { 0.6, 0.4 }, uncond = { 0.5, 0.5 };
  CHECK(guided(cond, uncond, 0.0) == cond);
  // w = 1: exp(2 log 0.6 - log 0.5) = 0.72, exp(2 log 0.4 - log 0.5) = 0.32.
  const auto g = guided(cond, uncond, 1.0);
  CHECK(g[0] == doctest::Approx(0.72 / 1.04).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(0.32 / 1.04).epsilon(1e-12));
  // Identical passes cancel for any weight.
  const auto same = guided(cond, cond, 3.0);
  CHECK(same[0] == doctest::Approx(0.6).epsilon(1e-12));
  // Zero entries are floored, not NaN.
  const auto floored = guided(std::vector<double> { 1.0, 0.0 },
                              std::vector<double> { 0.5, 0.5 }, 2.0);
  CHECK(floored[0] > 0.999);
  CHECK(std::isfinite(floored[1]));
}

TEST_CASE("tokenization") {
  const GraphTokenization tok;
  CHECK(tok.node_categories() == 10);
  CHECK(tok.token_width() == 10 + 32 * 5);

  const MolecularGraph benzene = parse_smiles("c1ccccc1");
  const TokenGraph x = tokenize(benzene, tok);
  CHECK(x.n_nodes == 6);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j)
      CHECK(x.edge(i, j) == x.edge(j, i));
  }
  const auto rows = one_hot_rows(x, tok);
  REQUIRE(rows.size() == 6);
  for (const auto &row: rows) {
    double sum = 0;
    for (double v: row)
      sum += v;
    CHECK(sum == 1 + tok.max_nodes);
  }

  const DecodedGraph back = decode(x, nullptr, tok);
  CHECK(test::isomorphic(back.graph, benzene));
  CHECK(back.validity.valid);

  CHECK_THROWS_AS(tokenize(parse_smiles("[NH4+]"), tok), InvalidGraph);
  CHECK_THROWS_AS(tokenize(parse_smiles("[H][H]"), tok), InvalidGraph);
}

TEST_CASE("decode symmetrizes disagreeing edge blocks") {
  const GraphTokenization tok;
  TokenGraph x = empty_tokens(tok, 3);
  x.edge(0, 1) = 1;  // single
  x.edge(1, 0) = 2;  // double
  x.edge(1, 2) = 1;
  x.edge(2, 1) = 0;

  TokenDistributions p;
  p.nodes.assign(3, std::vector<double>(10, 0.1));
  p.edges.assign(x.edges.size(), std::vector<double>(5, 0.2));
  p.edges[0 * x.max_nodes + 1] = { 0.1, 0.3, 0.2, 0.2, 0.2 };
  p.edges[1 * x.max_nodes + 0] = { 0.1, 0.1, 0.6, 0.1, 0.1 };

  const DecodedGraph d = decode(x, &p, tok);
  REQUIRE(d.graph.bond_between(0, 1));
  CHECK(d.graph.bond(*d.graph.bond_between(0, 1)).order == BondOrder::kDouble);
  // Equal mass (0.2 each): lower category (no bond) wins.
  CHECK_FALSE(d.graph.bond_between(1, 2));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j)
      CHECK(d.tokens.edge(i, j) == d.tokens.edge(j, i));
  }
}

TEST_CASE("forward sampling") {
  SUBCASE("identity steps leave x0 untouched") {
    DiffusionModel model { GraphTokenization {},
                           TransitionModel(NoiseSchedule::custom({ 0, 0, 0 }),
                                           TransitionFamily::kUniform, 10),
                           TransitionModel(NoiseSchedule::custom({ 0, 0, 0 }),
                                           TransitionFamily::kUniform, 5) };
    const TokenGraph x0 = tokenize(parse_smiles("CC(=O)Nc1ccccc1"),
                                   model.tokenization);
    Rng rng(4);
    CHECK(forward_sample(model, x0, 3, rng) == x0);
    CHECK_THROWS_AS(forward_sample(model, x0, 4, rng), TimestepOutOfRange);
    CHECK_THROWS_AS(forward_sample(model, x0, 0, rng), TimestepOutOfRange);
  }
  SUBCASE("empirical marginal matches x0 Q̄^t") {
    const DiffusionModel model = small_model(50);
    const TokenGraph x0 = tokenize(parse_smiles("CCOc1ccccc1"), model.tokenization);
    const int t = 20;
    Rng rng(5);
    // Node 0 is carbon (category 0); count over 10^5 draws of that token.
    std::vector<double> counts(10, 0.0);
    const int draws = 100000 / x0.n_nodes + 1;
    int total = 0;
    for (int k = 0; k < draws; ++k) {
      const TokenGraph xt = forward_sample(model, x0, t, rng);
      for (int i = 0; i < xt.n_nodes; ++i) {
        if (x0.nodes[i] == 0) {
          counts[xt.nodes[i]] += 1;
          ++total;
        }
      }
    }
    const auto expected = forward_marginal(model.nodes, 0, t);
    for (int c = 0; c < 10; ++c)
      CHECK(std::abs(counts[c] / total - expected[c]) <= 0.01);
  }
}

TEST_CASE("reverse step") {
  const DiffusionModel model = small_model(30);
  const TokenGraph x0 =
      tokenize(parse_smiles("CC(=O)Nc1ccccc1"), model.tokenization);
  OracleDenoiser oracle(x0, model.tokenization);

  SUBCASE("t = 1 with the oracle returns x0") {
    Rng rng(6);
    for (int k = 0; k < 20; ++k) {
      const TokenGraph x1 = forward_sample(model, x0, 1, rng);
      CHECK(reverse_step(model, x1, 1, oracle, {}, {}, rng).x == x0);
    }
  }
  SUBCASE("zero guidance weight is the conditional denoiser alone") {
    const std::vector<double> node(10, 0.1);
    const std::vector<double> edge = { 0.5, 0.2, 0.1, 0.1, 0.1 };
    ConstantDenoiser guided_model(node, edge, std::vector<double>(10, 0.1),
                                  std::vector<double>(5, 0.2));
    FixedDenoiser plain(node, edge);
    ConditionVector c;
    c.categorical = { 1 };
    Rng a(7), b(7), r(8);
    const TokenGraph xt = forward_sample(model, x0, 15, r);
    const ReverseStep s1 =
        reverse_step(model, xt, 15, guided_model, c, Guidance { 0.0, {} }, a);
    const ReverseStep s2 = reverse_step(model, xt, 15, plain, c, {}, b);
    CHECK(s1.x == s2.x);
    CHECK(s1.probabilities.nodes == s2.probabilities.nodes);
  }
  SUBCASE("guidance uses the dropped condition") {
    ConstantDenoiser d(std::vector<double> { 0.5, 0.5, 0, 0, 0, 0, 0, 0, 0, 0 },
                       { 0.6, 0.4, 0, 0, 0 },
                       std::vector<double> { 0.9, 0.1, 0, 0, 0, 0, 0, 0, 0, 0 },
                       { 0.6, 0.4, 0, 0, 0 });
    ConditionVector c;
    c.continuous = { 1.5 };
    Rng rng(9);
    const ReverseStep s = reverse_step(model, x0, 1, d, c, Guidance { 2.0, {} },
                                       rng);
    // At t = 1 the sampling distribution is the guided x0 estimate:
    // carbon weight 0.5^3 / 0.9^2, nitrogen 0.5^3 / 0.1^2.
    const double wc = 0.125 / 0.81, wn = 0.125 / 0.01;
    CHECK(s.probabilities.nodes[0][1]
          == doctest::Approx(wn / (wc + wn)).epsilon(1e-9));
  }
  SUBCASE("denoiser contract") {
    FixedDenoiser bad(std::vector<double>(10, 0.2), std::vector<double>(5, 0.2));
    Rng rng(10);
    CHECK_THROWS_AS(reverse_step(model, x0, 3, bad, {}, {}, rng),
                    DenoiserContract);
    FixedDenoiser narrow(std::vector<double>(9, 1.0 / 9),
                         std::vector<double>(5, 0.2));
    CHECK_THROWS_AS(reverse_step(model, x0, 3, narrow, {}, {}, rng),
                    DenoiserContract);
  }
}

TEST_CASE("sample_graph") {
  const DiffusionModel model = small_model(40);
  SUBCASE("planted benzene is recovered for any seed") {
    const MolecularGraph benzene = parse_smiles("c1ccccc1");
    OracleDenoiser oracle(tokenize(benzene, model.tokenization),
                          model.tokenization);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const DecodedGraph d = sample_graph(model, oracle, {}, {}, 6, seed);
      CHECK(test::isomorphic(d.graph, benzene));
      CHECK(d.validity.valid);
    }
  }
  SUBCASE("uniform denoiser never crashes decode") {
    UniformDenoiser uniform(model.tokenization);
    int valid = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const DecodedGraph d = sample_graph(model, uniform, {}, {}, 8, seed);
      CHECK(d.graph.atom_count() == 8);
      for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j)
          REQUIRE(d.tokens.edge(i, j) == d.tokens.edge(j, i));
      }
      valid += d.validity.valid ? 1 : 0;
    }
    MESSAGE("valid uniform samples: " << valid << "/100");
  }
  SUBCASE("seed determinism") {
    UniformDenoiser uniform(model.tokenization);
    const DecodedGraph a = sample_graph(model, uniform, {}, {}, 7, 123);
    const DecodedGraph b = sample_graph(model, uniform, {}, {}, 7, 123);
    const DecodedGraph c = sample_graph(model, uniform, {}, {}, 7, 124);
    CHECK(a.tokens == b.tokens);
    CHECK_FALSE(a.tokens == c.tokens);
  }
  SUBCASE("marginal family") {
    const DiffusionModel marginal = small_model(40, TransitionFamily::kMarginal);
    const MolecularGraph g = parse_smiles("CC(=O)O");
    OracleDenoiser oracle(tokenize(g, marginal.tokenization),
                          marginal.tokenization);
    CHECK(test::isomorphic(sample_graph(marginal, oracle, {}, {}, 4, 1).graph,
                           g));
  }
}

}  // namespace molforge
