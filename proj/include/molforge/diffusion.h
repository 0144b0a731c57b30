//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_DIFFUSION_H_
#define MOLFORGE_DIFFUSION_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "molforge/molgraph.h"

namespace molforge {

// mt19937_64 with a platform-independent mapping to doubles, so a seed
// reproduces the same trajectory everywhere.
class Rng {
public:
  explicit Rng(std::uint64_t seed): engine_(seed) { }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  std::uint64_t next() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

// Inverse-CDF draw; throws BadDistribution on an empty or all-zero row.
int sample_categorical(std::span<const double> probs, Rng &rng);

// ---------------------------------------------------------------------------
// Schedules and transition matrices

enum class ScheduleFamily { kLinear, kCosine, kCustom };

class NoiseSchedule {
public:
  // Betas from 1e-4 to 0.02, rescaled by 1000/T so short chains still mix.
  static NoiseSchedule linear(int steps);
  // Cosine cumulative schedule with offset 0.008; betas clipped at 0.999.
  static NoiseSchedule cosine(int steps);
  // Any betas in [0, 1). A zero beta is an identity step.
  static NoiseSchedule custom(std::vector<double> betas);

  ScheduleFamily family() const { return family_; }
  int steps() const { return static_cast<int>(betas_.size()); }
  // t in 1..T.
  double beta(int t) const { return betas_.at(t - 1); }
  // Product of (1 - beta_i) for i <= t; alpha_bar(0) == 1.
  double alpha_bar(int t) const { return alpha_bar_.at(t); }

private:
  NoiseSchedule(ScheduleFamily family, std::vector<double> betas);

  ScheduleFamily family_;
  std::vector<double> betas_;
  std::vector<double> alpha_bar_;
};

std::string to_string(ScheduleFamily family);
ScheduleFamily schedule_family_from_string(std::string_view name);

// Dense row-major square matrix.
struct Matrix {
  int n = 0;
  std::vector<double> data;

  Matrix() = default;
  explicit Matrix(int size): n(size), data(static_cast<std::size_t>(size) * size) { }
  static Matrix identity(int size);

  double &operator()(int i, int j) { return data[i * n + j]; }
  double operator()(int i, int j) const { return data[i * n + j]; }
  std::span<const double> row(int i) const {
    return { data.data() + static_cast<std::size_t>(i) * n,
             static_cast<std::size_t>(n) };
  }
};

Matrix operator*(const Matrix &a, const Matrix &b);

enum class TransitionFamily { kUniform, kMarginal };

std::string to_string(TransitionFamily family);
TransitionFamily transition_family_from_string(std::string_view name);

/// Per-step matrices Q^t ([Q^t]_ij = q(x^t = j | x^{t-1} = i)) and their
/// cumulative products Q̄^t = Q^1 ... Q^t, checked row-stochastic at
/// construction.
class TransitionModel {
public:
  TransitionModel(const NoiseSchedule &schedule, TransitionFamily family,
                  int categories,
                  std::optional<std::vector<double>> stationary = {});

  // Arbitrary row-stochastic steps; `limit` is the distribution used to
  // initialize reverse sampling.
  static TransitionModel from_matrices(std::vector<Matrix> steps,
                                       std::vector<double> limit);

  int categories() const { return categories_; }
  int steps() const { return static_cast<int>(steps_.size()); }
  // t in 1..T.
  const Matrix &step(int t) const;
  // t in 0..T; cumulative(0) is the identity.
  const Matrix &cumulative(int t) const;
  std::span<const double> stationary() const { return stationary_; }

private:
  TransitionModel() = default;
  void finish();

  int categories_ = 0;
  std::vector<Matrix> steps_;
  std::vector<Matrix> cumulative_;
  std::vector<double> stationary_;
};

// Row x0 of Q̄^t.
std::vector<double> forward_marginal(const TransitionModel &model, int x0,
                                     int t);

/// q(x^{t-1} | x^t, x^0) for a one-hot x^t and an x^0 given as a
/// distribution. A one-hot x^0 gives the normalized product of column x^t of
/// Q^t and row x^0 of Q̄^{t-1}; a general x^0 gives the x^0-weighted mixture
/// of those one-hot posteriors. Throws ZeroMass when a weighted x^0 leaves
/// no mass.
std::vector<double> posterior(const TransitionModel &model, int xt,
                              std::span<const double> x0, int t);
std::vector<double> posterior(const TransitionModel &model, int xt, int x0,
                              int t);

/// Predictor-free guidance in log space:
/// normalize(exp((1 + w) log p_cond - w log p_uncond)), floors at 1e-12.
/// w == 0 returns p_cond unchanged.
std::vector<double> guided(std::span<const double> p_cond,
                           std::span<const double> p_uncond, double w);

// ---------------------------------------------------------------------------
// Graph tokens

inline constexpr int kDefaultMaxNodes = 32;
inline constexpr int kEdgeCategories = 5;  // none, single, double, triple, aromatic

struct GraphTokenization {
  std::vector<Element> node_vocabulary = {
    Element::C, Element::N,  Element::O,  Element::S, Element::P,
    Element::F, Element::Cl, Element::Br, Element::I, Element::Star,
  };
  int max_nodes = kDefaultMaxNodes;

  int node_categories() const {
    return static_cast<int>(node_vocabulary.size());
  }
  int edge_categories() const { return kEdgeCategories; }
  // Width of one node token with its edge blocks: F_V + N_G * F_E.
  int token_width() const {
    return node_categories() + max_nodes * edge_categories();
  }
};

/// Categorical state of an n-node graph: one node category per node and
/// one edge category per (i, j) block of node i's token. Blocks with j >= n
/// or j == i are inactive and always hold category 0 (no bond).
struct TokenGraph {
  int n_nodes = 0;
  int max_nodes = 0;
  std::vector<int> nodes;
  std::vector<int> edges;  // n_nodes * max_nodes, row i is node i's blocks

  int &edge(int i, int j) { return edges[i * max_nodes + j]; }
  int edge(int i, int j) const { return edges[i * max_nodes + j]; }
  bool active(int i, int j) const { return i != j && j < n_nodes; }

  friend bool operator==(const TokenGraph &, const TokenGraph &) = default;
};

TokenGraph empty_tokens(const GraphTokenization &tok, int n_nodes);

// Throws InvalidGraph for elements outside the vocabulary, charged atoms, or
// graphs larger than max_nodes.
TokenGraph tokenize(const MolecularGraph &g, const GraphTokenization &tok);

// The one-hot matrix view: n rows of token_width() entries.
std::vector<std::vector<double>> one_hot_rows(const TokenGraph &x,
                                              const GraphTokenization &tok);

// Per-token distributions matching a TokenGraph's layout.
struct TokenDistributions {
  std::vector<std::vector<double>> nodes;
  std::vector<std::vector<double>> edges;  // n_nodes * max_nodes rows
};

// ---------------------------------------------------------------------------
// Conditions and denoisers

/// Property and text conditions for one sample. An empty optional is the
/// "dropped condition" sentinel that unconditional passes use.
struct ConditionVector {
  std::vector<std::optional<int>> categorical;
  std::vector<std::optional<double>> continuous;
  std::optional<std::vector<double>> text;

  // Same shape with every slot dropped.
  ConditionVector dropped() const;
  bool empty() const;
};

class Denoiser {
public:
  virtual ~Denoiser() = default;
  // Distributions over x^0 for every token of xt.
  virtual TokenDistributions predict(const TokenGraph &xt, int t,
                                     const ConditionVector &c) = 0;
};

// Returns a fixed planted x^0 as one-hot rows.
class OracleDenoiser: public Denoiser {
public:
  OracleDenoiser(TokenGraph x0, const GraphTokenization &tok);
  TokenDistributions predict(const TokenGraph &xt, int t,
                             const ConditionVector &c) override;

private:
  TokenGraph x0_;
  int node_categories_;
  int edge_categories_;
};

// Uniform over all categories for every active token.
class UniformDenoiser: public Denoiser {
public:
  explicit UniformDenoiser(const GraphTokenization &tok);
  TokenDistributions predict(const TokenGraph &xt, int t,
                             const ConditionVector &c) override;

private:
  int node_categories_;
  int edge_categories_;
};

// Returns the same node/edge rows for every token; one pair for conditioned
// calls and one for calls whose condition is entirely dropped.
class ConstantDenoiser: public Denoiser {
public:
  ConstantDenoiser(std::vector<double> node_cond,
                   std::vector<double> edge_cond,
                   std::vector<double> node_uncond,
                   std::vector<double> edge_uncond);
  TokenDistributions predict(const TokenGraph &xt, int t,
                             const ConditionVector &c) override;

private:
  std::vector<double> node_cond_, edge_cond_, node_uncond_, edge_uncond_;
};

// Throws DenoiserContract unless every active row is a distribution of the
// right width within 1e-6.
void check_denoiser_output(const TokenDistributions &p, const TokenGraph &xt,
                           int node_categories, int edge_categories);

// ---------------------------------------------------------------------------
// Sampling

struct DiffusionModel {
  GraphTokenization tokenization;
  TransitionModel nodes;
  TransitionModel edges;

  int steps() const { return nodes.steps(); }
};

struct DiffusionConfig {
  TransitionFamily family = TransitionFamily::kUniform;
  ScheduleFamily schedule = ScheduleFamily::kCosine;
  int steps = 500;
  double guidance_weight = 2.0;
  GraphTokenization tokenization;
  // Marginal family only.
  std::vector<double> node_marginal;
  std::vector<double> edge_marginal;
};

DiffusionModel make_diffusion_model(const DiffusionConfig &config);

struct Guidance {
  double weight = 0.0;
  // Defaults to the conditioned vector with every slot dropped.
  std::optional<ConditionVector> unconditional;
};

// Each active token drawn from Cat(x^0_row Q̄^t). Throws TimestepOutOfRange.
TokenGraph forward_sample(const DiffusionModel &model, const TokenGraph &x0,
                          int t, Rng &rng);

struct ReverseStep {
  TokenGraph x;
  // The distributions each token was drawn from.
  TokenDistributions probabilities;
};

ReverseStep reverse_step(const DiffusionModel &model, const TokenGraph &xt,
                         int t, Denoiser &denoiser, const ConditionVector &c,
                         const Guidance &guidance, Rng &rng);

// Draw from the stationary distribution for every active token.
TokenGraph stationary_sample(const DiffusionModel &model, int n_nodes,
                             Rng &rng);

struct DecodedGraph {
  TokenGraph tokens;
  MolecularGraph graph;
  ValenceReport validity;
};

/// Turns final tokens into a graph. Disagreeing edge blocks (i, j) / (j, i)
/// resolve to the category with the larger sampling probability, ties to the
/// lower category. Aromatic atoms are those with an aromatic bond; hydrogens
/// are filled implicitly.
DecodedGraph decode(const TokenGraph &x, const TokenDistributions *probs,
                    const GraphTokenization &tok);

DecodedGraph sample_graph(const DiffusionModel &model, Denoiser &denoiser,
                          const ConditionVector &c, const Guidance &guidance,
                          int n_nodes, std::uint64_t seed);

}  // namespace molforge

#endif  // MOLFORGE_DIFFUSION_H_
