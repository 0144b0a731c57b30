//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <regex>

#include "molforge/error.h"
#include "molforge/orchestrator.h"

namespace molforge {
namespace {
// Deterministic value in [-1, 1) from a tuple.
double hashed_unit(std::int64_t a, std::int64_t b, std::int64_t c) {
  const std::array<std::int64_t, 3> t = { a, b, c };
  const std::uint64_t h = hash_tuple(t);
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char &c: out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}
}  // namespace

// ---------------------------------------------------------------------------
// Graph encoder

FingerprintEncoder::FingerprintEncoder(int dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
  if (dim <= 0)
    throw ConfigError("encoder dimension must be positive");
}

std::vector<double> FingerprintEncoder::encode(const MolecularGraph &g) {
  const std::vector<int> bits = morgan_fingerprint(g).on_bits();
  std::vector<double> v(dim_, 0.0);
  for (int bit: bits) {
    for (int d = 0; d < dim_; ++d)
      v[d] += hashed_unit(static_cast<std::int64_t>(seed_), bit, d);
  }
  if (!bits.empty()) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(bits.size()));
    for (double &x: v)
      x *= scale;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Scripted model

ScriptedLM::ScriptedLM(TokenVocabulary &vocab, std::vector<std::string> script,
                       int hidden_dim)
    : vocab_(vocab), hidden_dim_(hidden_dim) {
  if (hidden_dim <= 0)
    throw ConfigError("hidden dimension must be positive");
  heuristic_.fill(1.0 / kHeuristicChoices);
  for (const auto &t: script) {
    const auto found = vocab.find(t);
    script_.push_back(found ? *found : vocab.add_word(t));
  }
}

ScriptedLM ScriptedLM::from_json(TokenVocabulary &vocab, const nlohmann::json &j) {
  try {
    ScriptedLM lm(vocab, j.at("tokens").get<std::vector<std::string>>(),
                  j.value("hidden_dim", 16));
    if (j.contains("hidden")) {
      for (const auto &[pos, v]: j["hidden"].items())
        lm.set_hidden(std::stoi(pos), v.get<std::vector<double>>());
    }
    if (j.contains("heuristic")) {
      const auto p = j["heuristic"].get<std::vector<double>>();
      if (p.size() != kHeuristicChoices)
        throw ConfigError("scripted heuristic needs 5 probabilities");
      std::array<double, kHeuristicChoices> a;
      std::copy(p.begin(), p.end(), a.begin());
      heuristic_score(a);
      lm.set_heuristic(a);
    }
    return lm;
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("bad scripted model: ") + e.what());
  } catch (const std::invalid_argument &e) {
    throw ConfigError("bad hidden position in scripted model");
  }
}

ScriptedLM ScriptedLM::load(TokenVocabulary &vocab,
                            const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(vocab, j);
}

void ScriptedLM::set_hidden(int position, std::vector<double> v) {
  if (static_cast<int>(v.size()) != hidden_dim_)
    throw DimensionMismatch("hidden vector at position " + std::to_string(position)
                            + " has " + std::to_string(v.size())
                            + " entries, expected " + std::to_string(hidden_dim_));
  hidden_[position] = std::move(v);
}

LmOutput ScriptedLM::forward(std::span<const int> tokens,
                             std::span<const Embedding> embeddings,
                             LmPurpose purpose) {
  calls_.push_back({ std::vector<int>(tokens.begin(), tokens.end()),
                     std::vector<Embedding>(embeddings.begin(), embeddings.end()),
                     purpose });
  LmOutput out;
  const int pos = static_cast<int>(tokens.size()) - 1;
  if (const auto it = hidden_.find(pos); it != hidden_.end()) {
    out.hidden = it->second;
  } else {
    const int last = tokens.empty() ? -1 : tokens.back();
    out.hidden.resize(hidden_dim_);
    for (int d = 0; d < hidden_dim_; ++d)
      out.hidden[d] = hashed_unit(pos, last, d);
  }
  out.next.assign(vocab_.size(), 0.0);
  switch (purpose) {
  case LmPurpose::kNextToken: {
    const int id = cursor_ < script_.size() ? script_[cursor_] : vocab_.end_of_sequence();
    if (cursor_ < script_.size())
      ++cursor_;
    out.next[id] = 1.0;
    break;
  }
  case LmPurpose::kQuery:
    out.next[vocab_.end_of_sequence()] = 1.0;
    break;
  case LmPurpose::kHeuristic: {
    int k = 0;
    for (const char *letter: { "A", "B", "C", "D", "E" })
      out.next[*vocab_.find(letter)] = heuristic_[k++];
    break;
  }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Query vectors

AffineProjection AffineProjection::identity(int dim) {
  AffineProjection p;
  p.in_dim = p.out_dim = dim;
  p.weights.assign(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i)
    p.weights[static_cast<std::size_t>(i) * dim + i] = 1.0;
  p.bias.assign(dim, 0.0);
  return p;
}

AffineProjection AffineProjection::random(int in_dim, int out_dim,
                                          std::uint64_t seed) {
  if (in_dim <= 0 || out_dim <= 0)
    throw DimensionMismatch("projection dimensions must be positive");
  AffineProjection p;
  p.in_dim = in_dim;
  p.out_dim = out_dim;
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(in_dim));
  p.weights.resize(static_cast<std::size_t>(in_dim) * out_dim);
  for (double &w: p.weights)
    w = (2.0 * rng.uniform() - 1.0) * scale;
  p.bias.assign(out_dim, 0.0);
  return p;
}

std::vector<double> AffineProjection::apply(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != in_dim)
    throw DimensionMismatch("projection expects " + std::to_string(in_dim)
                            + " inputs, got " + std::to_string(v.size()));
  std::vector<double> out(bias);
  for (int r = 0; r < out_dim; ++r) {
    const double *row = weights.data() + static_cast<std::size_t>(r) * in_dim;
    double acc = 0.0;
    for (int c = 0; c < in_dim; ++c)
      acc += row[c] * v[c];
    out[r] += acc;
  }
  return out;
}

std::vector<double> query_condition(const std::vector<std::vector<double>> &vectors,
                                    const AffineProjection &projection) {
  if (vectors.size() != kQueryTokens)
    throw DimensionMismatch("need " + std::to_string(kQueryTokens)
                            + " query vectors, got "
                            + std::to_string(vectors.size()));
  const std::size_t dim = vectors.front().size();
  std::vector<double> mean(dim, 0.0);
  for (const auto &v: vectors) {
    if (v.size() != dim)
      throw DimensionMismatch("query vectors differ in length");
    for (std::size_t i = 0; i < dim; ++i)
      mean[i] += v[i];
  }
  for (double &x: mean)
    x /= kQueryTokens;
  return projection.apply(mean);
}

// ---------------------------------------------------------------------------
// Property slots

PropertySchema PropertySchema::benchmark() {
  return { { "HIV", "BBBP", "BACE" }, { "CO2Perm", "N2Perm", "O2Perm", "FFV", "TC" } };
}

ConditionVector extract_properties(std::string_view question,
                                   const PropertySchema &schema) {
  ConditionVector c;
  c.categorical.assign(schema.categorical.size(), std::nullopt);
  c.continuous.assign(schema.continuous.size(), std::nullopt);
  static const std::regex annotation(
      R"(([A-Za-z][A-Za-z0-9_]*)\s*:\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?))");
  const std::string text(question);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), annotation);
       it != std::sregex_iterator(); ++it) {
    const std::string name = lower((*it)[1].str());
    const double value = std::stod((*it)[2].str());
    for (std::size_t i = 0; i < schema.categorical.size(); ++i) {
      if (lower(schema.categorical[i]) == name && (value == 0.0 || value == 1.0))
        c.categorical[i] = static_cast<int>(value);
    }
    for (std::size_t i = 0; i < schema.continuous.size(); ++i) {
      if (lower(schema.continuous[i]) == name)
        c.continuous[i] = value;
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Sampler

DiffusionSampler::DiffusionSampler(const DiffusionModel &model, Denoiser &denoiser,
                                   Guidance guidance, int n_nodes,
                                   std::uint64_t seed)
    : model_(model), denoiser_(denoiser), guidance_(std::move(guidance)),
      n_nodes_(n_nodes), seed_(seed) { }

DecodedGraph DiffusionSampler::sample(const ConditionVector &c, int) {
  // Every call draws a fresh seed so retries and later designs differ while
  // the whole sequence stays reproducible.
  return sample_graph(model_, denoiser_, c, guidance_, n_nodes_, seed_ + calls_++);
}

}  // namespace molforge
