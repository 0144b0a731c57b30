//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_RETRO_H_
#define MOLFORGE_RETRO_H_

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "molforge/molgraph.h"
#include "molforge/templates.h"

namespace molforge {

// ---------------------------------------------------------------------------
// Heuristic

inline constexpr int kHeuristicChoices = 5;
// Choice A (all readily available) through E (extensive multi-step work).
inline constexpr std::array<double, kHeuristicChoices> kChoiceScores = {
  0.0, 1.0, 2.5, 4.5, 7.0
};

// Sum of probs[i] * kChoiceScores[i]. Throws BadDistribution unless probs has
// five non-negative entries summing to 1 within 1e-6.
double heuristic_score(std::span<const double> probs);

struct HeuristicQuery {
  std::string target;  // SMILES
  int step = 0;
  std::optional<std::string> template_id;
  std::optional<std::vector<std::string>> reactants;
};

// The multi-choice question put to a language model for one frontier node.
std::string heuristic_prompt(const HeuristicQuery &q);

class HeuristicProvider {
public:
  virtual ~HeuristicProvider() = default;
  virtual std::array<double, kHeuristicChoices>
  probabilities(const HeuristicQuery &q) = 0;
};

// Always choice A: J_heuristic == 0 everywhere.
class ZeroHeuristic: public HeuristicProvider {
public:
  std::array<double, kHeuristicChoices>
  probabilities(const HeuristicQuery &q) override;
};

// ---------------------------------------------------------------------------
// Stock and template library

class Stock {
public:
  Stock() = default;
  // One SMILES per line; '#' comments. Throws std::runtime_error-derived
  // errors naming the line on parse failure.
  static Stock load(const std::filesystem::path &path);
  static Stock from_smiles(std::span<const std::string> smiles);

  void insert(const MolecularGraph &g);
  bool contains(const MolecularGraph &g) const;
  bool contains_key(const std::string &key) const { return keys_.count(key) > 0; }
  std::size_t size() const { return keys_.size(); }
  const std::filesystem::path &source() const { return source_; }

private:
  std::unordered_set<std::string> keys_;
  std::filesystem::path source_;
};

class TemplateLibrary {
public:
  TemplateLibrary() = default;
  explicit TemplateLibrary(std::vector<RetroTemplate> templates);
  static TemplateLibrary load(const std::filesystem::path &path);

  const RetroTemplate *find(const std::string &id) const;
  void add(RetroTemplate t);
  const std::vector<RetroTemplate> &templates() const { return templates_; }
  std::size_t size() const { return templates_.size(); }

private:
  std::vector<RetroTemplate> templates_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// ---------------------------------------------------------------------------
// One-step predictors

struct Proposal {
  std::string template_id;
  double prob = 0.0;
  // Set when the provider ships the rule itself instead of a library id.
  std::optional<RetroTemplate> inline_template;
};

class Predictor {
public:
  virtual ~Predictor() = default;
  // At most k proposals, probabilities in (0, 1], sorted descending.
  virtual std::vector<Proposal> propose(const MolecularGraph &product,
                                        std::string_view context, int k) = 0;
};

// Throws PredictorUnavailable when a proposal list breaks the contract.
void check_proposals(std::span<const Proposal> proposals);

// Table JSONL: {"product": SMILES, "proposals": [{"template_id", "prob"}]}.
// Products are looked up by canonical key; unknown products get nothing.
class TablePredictor: public Predictor {
public:
  static TablePredictor load(const std::filesystem::path &path);
  void add(const MolecularGraph &product, std::vector<Proposal> proposals);

  std::vector<Proposal> propose(const MolecularGraph &product,
                                std::string_view context, int k) override;

private:
  std::map<std::string, std::vector<Proposal>> table_;
};

// Proposes every library template whose product pattern occurs in the
// molecule, scored by the template prior (ties broken by id).
class TemplatePriorPredictor: public Predictor {
public:
  explicit TemplatePriorPredictor(const TemplateLibrary &library)
      : library_(library) { }
  std::vector<Proposal> propose(const MolecularGraph &product,
                                std::string_view context, int k) override;

private:
  const TemplateLibrary &library_;
};

// ---------------------------------------------------------------------------
// Expansion

struct ReactionProposal {
  std::string template_id;
  double prob = 0.0;
  ReactantSet reactants;
};

struct ExpansionStats {
  long predictor_calls = 0;
  long proposals = 0;
  long proposals_dropped = 0;  // unknown id, unsupported or no valid rewrite
  long reactions = 0;
};

// What the planner calls to grow one molecule node. The template-backed
// source is the normal one; tests plug in synthetic reaction networks.
class ExpansionSource {
public:
  virtual ~ExpansionSource() = default;
  virtual std::vector<ReactionProposal> expand(const MolecularGraph &product,
                                               std::string_view context, int k,
                                               ExpansionStats &stats) = 0;
  virtual bool validate(const std::string &template_id,
                        std::span<const MolecularGraph> reactants,
                        const MolecularGraph &product) = 0;
};

class TemplateExpansion: public ExpansionSource {
public:
  TemplateExpansion(Predictor &predictor, const TemplateLibrary &library)
      : predictor_(predictor), library_(library) { }

  std::vector<ReactionProposal> expand(const MolecularGraph &product,
                                       std::string_view context, int k,
                                       ExpansionStats &stats) override;
  bool validate(const std::string &template_id,
                std::span<const MolecularGraph> reactants,
                const MolecularGraph &product) override;

private:
  const RetroTemplate *resolve(const Proposal &p);

  Predictor &predictor_;
  const TemplateLibrary &library_;
  std::map<std::string, RetroTemplate> inline_;
};

// ---------------------------------------------------------------------------
// Search tree

struct MoleculeNode {
  explicit MoleculeNode(MolecularGraph g): graph(std::move(g)) { }

  MolecularGraph graph;
  std::string key;
  std::string smiles;
  int parent = -1;  // reaction index, -1 for the root
  int depth = 0;    // reactions between the root and this node
  std::vector<int> reactions;
  bool in_stock = false;
  bool expanded = false;
  bool solved = false;
  double path_cost = 0.0;  // J_current
  double heuristic = 0.0;  // J_heuristic
  double best_cost = 0.0;  // cheapest solved subtree, valid when solved
};

struct ReactionNode {
  std::string template_id;
  double prob = 0.0;
  double cost = 0.0;  // -ln prob
  int parent = -1;    // molecule index
  std::vector<int> children;
  bool solved = false;
  double best_cost = 0.0;
};

class SearchTree {
public:
  int add_root(MolecularGraph g, bool in_stock);
  int add_reaction(int molecule, std::string template_id, double prob);
  int add_child(int reaction, MolecularGraph g, bool in_stock);

  const MoleculeNode &molecule(int i) const { return molecules_.at(i); }
  MoleculeNode &molecule(int i) { return molecules_.at(i); }
  const ReactionNode &reaction(int i) const { return reactions_.at(i); }
  ReactionNode &reaction(int i) { return reactions_.at(i); }
  int molecule_count() const { return static_cast<int>(molecules_.size()); }
  int reaction_count() const { return static_cast<int>(reactions_.size()); }

  // Keys of the molecule and all its molecule ancestors.
  std::vector<std::string> lineage_keys(int molecule) const;

  // Re-derives solved flags bottom-up from scratch; used to audit the
  // incremental flags.
  std::vector<bool> recompute_solved() const;

private:
  std::vector<MoleculeNode> molecules_;
  std::vector<ReactionNode> reactions_;
};

/// Unexpanded, unsolved molecule leaves ordered by J ascending, FIFO among
/// exact ties. J is re-read through `current` at selection time, so a stale
/// cached value never wins.
class Frontier {
public:
  using CostFn = std::function<double(int)>;
  explicit Frontier(CostFn current): current_(std::move(current)) { }

  void insert(int node, double j);
  // Throws EmptyFrontier.
  int select_next();
  std::optional<double> min_j();
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  bool contains(int node) const { return where_.count(node) > 0; }

private:
  struct Entry {
    double j;
    long seq;
    int node;
    friend auto operator<=>(const Entry &, const Entry &) = default;
  };
  void refresh_top();

  CostFn current_;
  std::set<Entry> entries_;
  std::map<int, Entry> where_;
  long next_seq_ = 0;
};

// ---------------------------------------------------------------------------
// Routes and planning

struct RouteReaction;

struct RouteNode {
  std::string smiles;
  bool in_stock = false;
  std::vector<RouteReaction> reaction;  // zero or one entry
};

struct RouteReaction {
  std::string template_id;
  double prob = 0.0;
  double cost = 0.0;
  std::vector<RouteNode> reactants;
};

struct Route {
  RouteNode root;
  int steps = 0;
  double total_cost = 0.0;
};

// Reactions in root-to-leaf (pre-order) order.
std::vector<const RouteReaction *> route_reactions(const Route &route);
bool route_leaves_in_stock(const RouteNode &node, const Stock &stock);

nlohmann::json route_to_json(const Route &route);
Route route_from_json(const nlohmann::json &j);

enum class FailureReason { kBudgetIterations, kBudgetTime, kExhausted };
std::string to_string(FailureReason r);

struct PlanStats {
  long iterations = 0;
  long expansions = 0;
  long heuristic_calls = 0;
  long reactions_pruned = 0;  // cycle guard
  ExpansionStats expansion;
};

struct Failure {
  FailureReason reason = FailureReason::kExhausted;
};

struct PlanResult {
  std::string target;
  std::optional<Route> route;
  std::optional<Failure> failure;
  PlanStats stats;

  bool ok() const { return route.has_value(); }
};

nlohmann::json plan_result_to_json(const PlanResult &r);

inline constexpr int kDefaultTopK = 50;
inline constexpr int kDefaultMaxIterations = 300;
inline constexpr double kDefaultMaxSeconds = 30.0;

struct PlannerConfig {
  int k = kDefaultTopK;
  int max_iterations = kDefaultMaxIterations;
  double max_seconds = kDefaultMaxSeconds;
  // Return the first route that solves the root instead of continuing until
  // no frontier node can beat it.
  bool stop_at_first_route = false;
};

// Seconds since an arbitrary origin; injectable so tests can drive time.
using Clock = std::function<double()>;
Clock steady_clock_seconds();

class Planner {
public:
  Planner(const MolecularGraph &target, const Stock &stock,
          ExpansionSource &source, HeuristicProvider &heuristic,
          PlannerConfig config = {}, std::string context = {},
          Clock clock = steady_clock_seconds());

  // Single pieces of the loop, exposed for inspection.
  int select_next() { return frontier_.select_next(); }
  std::vector<int> expand(int molecule);
  // Propagates solved flags and best costs upward from the given molecules;
  // returns whether the root is solved.
  bool update_solved(std::span<const int> changed);
  Route extract_route();

  PlanResult run();

  const SearchTree &tree() const { return tree_; }
  Frontier &frontier() { return frontier_; }
  const PlanStats &stats() const { return stats_; }

private:
  void push_frontier(int molecule);
  double j_of(int molecule) const;
  RouteNode extract(int molecule);
  bool done_searching();

  const Stock &stock_;
  ExpansionSource &source_;
  HeuristicProvider &heuristic_;
  PlannerConfig config_;
  std::string context_;
  Clock clock_;
  SearchTree tree_;
  Frontier frontier_;
  PlanStats stats_;
  std::map<std::pair<std::string, int>, double> heuristic_cache_;
};

PlanResult plan(const MolecularGraph &target, const Stock &stock,
                ExpansionSource &source, HeuristicProvider &heuristic,
                const PlannerConfig &config = {}, std::string context = {},
                Clock clock = steady_clock_seconds());

}  // namespace molforge

#endif  // MOLFORGE_RETRO_H_
