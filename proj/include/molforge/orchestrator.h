//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_ORCHESTRATOR_H_
#define MOLFORGE_ORCHESTRATOR_H_

#include <array>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "molforge/diffusion.h"
#include "molforge/molgraph.h"
#include "molforge/retro.h"

namespace molforge {

// ---------------------------------------------------------------------------
// Vocabulary

enum class SpecialToken {
  kDesignStart,
  kDesignBody,
  kDesignEnd,
  kRetroStart,
  kRetroBody,
  kRetroEnd,
  kMolecule,
  kCallbackStart,
  kCallbackEnd,
};

inline constexpr int kSpecialTokenCount = 9;
inline constexpr int kQueryTokens = 8;

// "<design_start>" and so on.
std::string_view special_text(SpecialToken t);

inline constexpr std::string_view kEndOfSequence = "</s>";
inline constexpr std::string_view kUnknownWord = "<unk>";

/// Ids 0..8 are the special tokens in declaration order; base words follow.
/// "</s>", "<unk>" and the heuristic answer letters "A".."E" are always
/// present.
class TokenVocabulary {
public:
  TokenVocabulary();
  explicit TokenVocabulary(const std::vector<std::string> &words);

  // Returns the id of an existing word or appends it. Throws ConfigError for
  // empty words, words with whitespace and special-token spellings.
  int add_word(std::string_view word);

  int size() const { return kSpecialTokenCount + static_cast<int>(words_.size()); }
  int special(SpecialToken t) const { return static_cast<int>(t); }
  bool is_special(int id) const { return id >= 0 && id < kSpecialTokenCount; }
  std::optional<SpecialToken> as_special(int id) const;
  int end_of_sequence() const { return eos_; }
  int unknown() const { return unk_; }

  // Special or word id; std::nullopt when unknown.
  std::optional<int> find(std::string_view text) const;
  // Like find(), but unknown words map to "<unk>".
  int id(std::string_view text) const;
  std::string_view text(int id) const;

  std::vector<int> encode_words(std::string_view text) const;
  // Words joined by single spaces; special tokens are skipped.
  std::string detokenize(std::span<const int> ids) const;

private:
  std::vector<std::string> words_;
  std::map<std::string, int, std::less<>> index_;
  int eos_ = -1;
  int unk_ = -1;
};

// ---------------------------------------------------------------------------
// Model interfaces

using Embedding = std::optional<std::vector<double>>;

// Why the orchestrator is calling the model. A real model computes the same
// forward pass for all three; scripted models use it to keep their place.
enum class LmPurpose { kNextToken, kQuery, kHeuristic };

struct LmOutput {
  std::vector<double> next;    // distribution over the vocabulary
  std::vector<double> hidden;  // hidden state of the last history position
};

class LanguageModel {
public:
  virtual ~LanguageModel() = default;
  virtual int hidden_dim() const = 0;
  // embeddings[i] is set for molecule-token positions.
  virtual LmOutput forward(std::span<const int> tokens,
                           std::span<const Embedding> embeddings,
                           LmPurpose purpose) = 0;
};

class GraphEncoder {
public:
  virtual ~GraphEncoder() = default;
  virtual int dim() const = 0;
  virtual std::vector<double> encode(const MolecularGraph &g) = 0;
};

// Morgan bits folded to `dim` through a fixed pseudo-random projection
// derived from `seed`.
class FingerprintEncoder: public GraphEncoder {
public:
  FingerprintEncoder(int dim, std::uint64_t seed);
  int dim() const override { return dim_; }
  std::vector<double> encode(const MolecularGraph &g) override;

private:
  int dim_;
  std::uint64_t seed_;
};

/// Replays a token script. Each kNextToken call returns a one-hot on the
/// next script entry ("</s>" once it runs out). Hidden vectors come from
/// the position table when present, otherwise from a hash of the position
/// and token. kHeuristic calls return `heuristic` spread over "A".."E".
class ScriptedLM: public LanguageModel {
public:
  ScriptedLM(TokenVocabulary &vocab, std::vector<std::string> script,
             int hidden_dim);

  // {"tokens": [...], "hidden": {"<pos>": [...]}, "hidden_dim": n,
  //  "heuristic": [5 probs]}. Script words are added to `vocab`.
  static ScriptedLM from_json(TokenVocabulary &vocab, const nlohmann::json &j);
  static ScriptedLM load(TokenVocabulary &vocab,
                         const std::filesystem::path &path);

  int hidden_dim() const override { return hidden_dim_; }
  LmOutput forward(std::span<const int> tokens,
                   std::span<const Embedding> embeddings,
                   LmPurpose purpose) override;

  void set_hidden(int position, std::vector<double> v);
  void set_heuristic(std::array<double, kHeuristicChoices> p) { heuristic_ = p; }

  struct Call {
    std::vector<int> tokens;
    std::vector<Embedding> embeddings;
    LmPurpose purpose;
  };
  const std::vector<Call> &calls() const { return calls_; }
  std::size_t cursor() const { return cursor_; }

private:
  const TokenVocabulary &vocab_;
  std::vector<int> script_;
  int hidden_dim_;
  std::map<int, std::vector<double>> hidden_;
  std::array<double, kHeuristicChoices> heuristic_;
  std::size_t cursor_ = 0;
  std::vector<Call> calls_;
};

// ---------------------------------------------------------------------------
// Query vectors

// out = weights * in + bias, weights row-major out_dim x in_dim.
struct AffineProjection {
  int in_dim = 0;
  int out_dim = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  static AffineProjection identity(int dim);
  // Entries uniform in +-1/sqrt(in_dim), zero bias.
  static AffineProjection random(int in_dim, int out_dim, std::uint64_t seed);
  std::vector<double> apply(std::span<const double> v) const;
};

inline constexpr int kDefaultConditionDim = 256;

// Elementwise mean of exactly kQueryTokens vectors, then the projection.
// Throws DimensionMismatch.
std::vector<double> query_condition(const std::vector<std::vector<double>> &vectors,
                                    const AffineProjection &projection);

// ---------------------------------------------------------------------------
// Property slots

struct PropertySchema {
  std::vector<std::string> categorical;
  std::vector<std::string> continuous;

  // HIV, BBBP, BACE / CO2Perm, N2Perm, O2Perm, FFV, TC.
  static PropertySchema benchmark();
};

// Reads "name: value" annotations for the schema's properties (names matched
// case-insensitively). Categorical values must be 0 or 1; anything else
// leaves the slot empty.
ConditionVector extract_properties(std::string_view question,
                                   const PropertySchema &schema);

// ---------------------------------------------------------------------------
// Molecule sampling

class MoleculeSampler {
public:
  virtual ~MoleculeSampler() = default;
  // attempt counts from 0 within one design call.
  virtual DecodedGraph sample(const ConditionVector &c, int attempt) = 0;
};

class DiffusionSampler: public MoleculeSampler {
public:
  DiffusionSampler(const DiffusionModel &model, Denoiser &denoiser,
                   Guidance guidance, int n_nodes, std::uint64_t seed);
  DecodedGraph sample(const ConditionVector &c, int attempt) override;

private:
  const DiffusionModel &model_;
  Denoiser &denoiser_;
  Guidance guidance_;
  int n_nodes_;
  std::uint64_t seed_;
  std::uint64_t calls_ = 0;
};

// ---------------------------------------------------------------------------
// Session

enum class SessionState { kText, kDesignQuery, kDesigning, kRetroQuery, kRetro, kCallback };
std::string to_string(SessionState s);

enum class ElementKind { kText, kMolecule, kReaction, kCallback, kFailure };
std::string to_string(ElementKind k);

struct ReactionElement {
  std::string product;
  std::string template_id;
  double prob = 0.0;
  std::vector<std::string> reactants;
};

struct SessionElement {
  ElementKind kind = ElementKind::kText;
  std::string text;                         // text, callback
  std::optional<MolecularGraph> molecule;   // molecule
  std::optional<ReactionElement> reaction;  // reaction
  nlohmann::json failure;                   // failure marker
};

struct GenerationSession {
  SessionState state = SessionState::kText;
  bool finished = false;
  std::vector<int> tokens;                   // Y
  std::vector<Embedding> embeddings;         // parallel to tokens
  std::vector<SessionElement> elements;
  std::vector<std::vector<double>> query_vectors;
  std::deque<int> pending;                   // auto-queued body tokens
  ConditionVector properties;                // host-side property slots
  std::optional<MolecularGraph> target;      // designed or host-provided
  std::optional<Route> route;
  std::vector<std::string> violations;
  std::size_t context_mark = 0;              // token index after the last molecule
  int callback_origin = -1;                  // SpecialToken that led to Callback
};

struct OrchestratorConfig {
  int design_retries = 3;
  int max_tokens = 512;
  bool greedy = true;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  PlannerConfig planner;
};

// Everything retro needs from the host; nullptr stock/source disables retro.
struct RetroInputs {
  const Stock *stock = nullptr;
  ExpansionSource *source = nullptr;
  Clock clock = steady_clock_seconds();
};

// HeuristicProvider that asks the model the multi-choice question and reads
// the answer-letter probabilities off the next-token distribution.
class LmHeuristic: public HeuristicProvider {
public:
  LmHeuristic(LanguageModel &lm, const TokenVocabulary &vocab);
  std::array<double, kHeuristicChoices>
  probabilities(const HeuristicQuery &q) override;

private:
  LanguageModel &lm_;
  const TokenVocabulary &vocab_;
  std::array<int, kHeuristicChoices> letters_;
};

class Orchestrator {
public:
  Orchestrator(const TokenVocabulary &vocab, LanguageModel &lm,
               GraphEncoder &encoder, MoleculeSampler &sampler,
               AffineProjection projection, OrchestratorConfig config = {},
               RetroInputs retro = {});

  // Adds the question words to Y as text (they are the prompt, not model
  // output) and sets the host-side property slots.
  GenerationSession start(std::string_view question,
                          ConditionVector properties = {}) const;

  // One token of progress. Throws ProtocolViolation if the session is
  // finished; model-side protocol errors are recorded, not thrown.
  void step(GenerationSession &s);
  void run_design(GenerationSession &s);
  void run_retro(GenerationSession &s);
  // Steps until "</s>" or max_tokens, firing modules as their queries
  // complete, then closes any open callback.
  void run(GenerationSession &s);

private:
  void emit(GenerationSession &s, int id, Embedding e = std::nullopt);
  void emit_special(GenerationSession &s, SpecialToken t);
  void append_text(GenerationSession &s, ElementKind kind, int id);
  void enter_callback(GenerationSession &s, SpecialToken origin);
  void violation(GenerationSession &s, int id, std::string why);
  void finish(GenerationSession &s);
  int pick(const std::vector<double> &dist);

  const TokenVocabulary &vocab_;
  LanguageModel &lm_;
  GraphEncoder &encoder_;
  MoleculeSampler &sampler_;
  AffineProjection projection_;
  OrchestratorConfig config_;
  RetroInputs retro_;
  Rng rng_;
};

// {"tokens": [...], "elements": [{"kind": ..., payload}], "state", "violations"}.
// Molecule payload: {"smiles", "graph"}; reaction: {"product", "template_id",
// "prob", "reactants"}; text/callback: {"text"}; failure: {"failure"}.
nlohmann::json session_to_json(const GenerationSession &s,
                               const TokenVocabulary &vocab);

// The designed molecule of a transcript: the first molecule element.
// Returns std::nullopt when there is none or it does not parse.
std::optional<MolecularGraph> transcript_molecule(const nlohmann::json &transcript);
// All text and callback element texts joined with single spaces.
std::string transcript_text(const nlohmann::json &transcript);
// The route stored by a successful retro segment, if any.
std::optional<Route> transcript_route(const nlohmann::json &transcript);

}  // namespace molforge

#endif  // MOLFORGE_ORCHESTRATOR_H_
