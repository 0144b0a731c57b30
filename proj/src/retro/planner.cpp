//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_set>

#include "molforge/chemio.h"
#include "molforge/error.h"
#include "molforge/retro.h"

namespace molforge {

// ---------------------------------------------------------------------------
// SearchTree

int SearchTree::add_root(MolecularGraph g, bool in_stock) {
  if (!molecules_.empty())
    throw Inconsistent("search tree already has a root");
  MoleculeNode node(std::move(g));
  node.key = canonical_key(node.graph);
  node.smiles = write_smiles(node.graph);
  node.in_stock = in_stock;
  node.solved = in_stock;
  molecules_.push_back(std::move(node));
  return 0;
}

int SearchTree::add_reaction(int molecule, std::string template_id,
                             double prob) {
  ReactionNode r;
  r.template_id = std::move(template_id);
  r.prob = prob;
  r.cost = -std::log(prob);
  r.parent = molecule;
  const int index = static_cast<int>(reactions_.size());
  reactions_.push_back(std::move(r));
  molecules_.at(molecule).reactions.push_back(index);
  return index;
}

int SearchTree::add_child(int reaction, MolecularGraph g, bool in_stock) {
  const ReactionNode &r = reactions_.at(reaction);
  const MoleculeNode &parent = molecules_.at(r.parent);
  MoleculeNode node(std::move(g));
  node.key = canonical_key(node.graph);
  node.smiles = write_smiles(node.graph);
  node.parent = reaction;
  node.depth = parent.depth + 1;
  node.path_cost = parent.path_cost + r.cost;
  node.in_stock = in_stock;
  node.solved = in_stock;
  const int index = static_cast<int>(molecules_.size());
  molecules_.push_back(std::move(node));
  reactions_[reaction].children.push_back(index);
  return index;
}

std::vector<std::string> SearchTree::lineage_keys(int molecule) const {
  std::vector<std::string> keys;
  for (int m = molecule; m >= 0;) {
    keys.push_back(molecules_[m].key);
    const int r = molecules_[m].parent;
    m = r < 0 ? -1 : reactions_[r].parent;
  }
  return keys;
}

std::vector<bool> SearchTree::recompute_solved() const {
  // Children always have larger indices than their parents, so one reverse
  // sweep settles everything.
  std::vector<bool> mol(molecules_.size()), rxn(reactions_.size());
  for (int m = molecule_count() - 1; m >= 0; --m) {
    const MoleculeNode &node = molecules_[m];
    bool solved = node.in_stock;
    for (int r: node.reactions) {
      bool all = !reactions_[r].children.empty();
      for (int c: reactions_[r].children)
        all = all && mol[c];
      rxn[r] = all;
      solved = solved || all;
    }
    mol[m] = solved;
  }
  std::vector<bool> out(mol.begin(), mol.end());
  out.insert(out.end(), rxn.begin(), rxn.end());
  return out;
}

// ---------------------------------------------------------------------------
// Frontier

void Frontier::insert(int node, double j) {
  if (where_.count(node))
    throw Inconsistent("node " + std::to_string(node)
                       + " is already on the frontier");
  const Entry e { j, next_seq_++, node };
  entries_.insert(e);
  where_.emplace(node, e);
}

void Frontier::refresh_top() {
  while (!entries_.empty()) {
    const Entry top = *entries_.begin();
    const double now = current_ ? current_(top.node) : top.j;
    if (now == top.j)
      return;
    entries_.erase(entries_.begin());
    const Entry fresh { now, top.seq, top.node };
    entries_.insert(fresh);
    where_[top.node] = fresh;
  }
}

int Frontier::select_next() {
  if (entries_.empty())
    throw EmptyFrontier("frontier is empty: search space exhausted");
  refresh_top();
  const Entry top = *entries_.begin();
  entries_.erase(entries_.begin());
  where_.erase(top.node);
  return top.node;
}

std::optional<double> Frontier::min_j() {
  if (entries_.empty())
    return std::nullopt;
  refresh_top();
  return entries_.begin()->j;
}

// ---------------------------------------------------------------------------
// Planner

Clock steady_clock_seconds() {
  return [] {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
  };
}

std::string to_string(FailureReason r) {
  switch (r) {
  case FailureReason::kBudgetIterations:
    return "budget_iterations";
  case FailureReason::kBudgetTime:
    return "budget_time";
  case FailureReason::kExhausted:
    return "exhausted";
  }
  return "unknown";
}

Planner::Planner(const MolecularGraph &target, const Stock &stock,
                 ExpansionSource &source, HeuristicProvider &heuristic,
                 PlannerConfig config, std::string context, Clock clock)
    : stock_(stock), source_(source), heuristic_(heuristic), config_(config),
      context_(std::move(context)), clock_(std::move(clock)),
      frontier_([this](int m) { return j_of(m); }) {
  if (config_.k <= 0 || config_.max_iterations < 0 || config_.max_seconds < 0)
    throw ConfigError("planner budgets must be non-negative and k positive");
  tree_.add_root(target, stock_.contains(target));
  if (!tree_.molecule(0).in_stock)
    push_frontier(0);
}

double Planner::j_of(int molecule) const {
  const MoleculeNode &m = tree_.molecule(molecule);
  return m.path_cost + m.heuristic;
}

void Planner::push_frontier(int molecule) {
  MoleculeNode &m = tree_.molecule(molecule);
  const auto cache_key = std::make_pair(m.key, m.depth);
  auto it = heuristic_cache_.find(cache_key);
  if (it == heuristic_cache_.end()) {
    HeuristicQuery q;
    q.target = m.smiles;
    q.step = m.depth;
    if (m.parent >= 0) {
      const ReactionNode &r = tree_.reaction(m.parent);
      q.template_id = r.template_id;
      std::vector<std::string> reactants;
      for (int c: r.children)
        reactants.push_back(tree_.molecule(c).smiles);
      q.reactants = std::move(reactants);
    }
    ++stats_.heuristic_calls;
    const auto probs = heuristic_.probabilities(q);
    it = heuristic_cache_.emplace(cache_key, heuristic_score(probs)).first;
  }
  m.heuristic = it->second;
  frontier_.insert(molecule, j_of(molecule));
}

std::vector<int> Planner::expand(int molecule) {
  {
    const MoleculeNode &m = tree_.molecule(molecule);
    if (m.expanded || m.in_stock)
      throw Inconsistent("expand called on an expanded or stock molecule");
  }
  tree_.molecule(molecule).expanded = true;
  ++stats_.expansions;

  const MolecularGraph product = tree_.molecule(molecule).graph;
  std::vector<ReactionProposal> proposals =
      source_.expand(product, context_, config_.k, stats_.expansion);

  const std::vector<std::string> lineage = tree_.lineage_keys(molecule);
  const std::unordered_set<std::string> ancestors(lineage.begin(),
                                                  lineage.end());
  std::vector<int> added;
  for (ReactionProposal &p: proposals) {
    std::vector<std::string> keys;
    bool cycle = false;
    for (const MolecularGraph &g: p.reactants) {
      keys.push_back(canonical_key(g));
      cycle = cycle || ancestors.count(keys.back());
    }
    // A reactant equal to an ancestor can never be part of a route, and the
    // AND semantics make the whole reaction useless.
    if (cycle || p.reactants.empty()) {
      ++stats_.reactions_pruned;
      continue;
    }
    const int r = tree_.add_reaction(molecule, p.template_id, p.prob);
    added.push_back(r);
    for (std::size_t i = 0; i < p.reactants.size(); ++i)
      tree_.add_child(r, std::move(p.reactants[i]),
                      stock_.contains_key(keys[i]));
    // Children go on the frontier only once all siblings exist, since the
    // heuristic query lists them.
    for (int c: tree_.reaction(r).children) {
      if (!tree_.molecule(c).in_stock)
        push_frontier(c);
    }
  }
  return added;
}

bool Planner::update_solved(std::span<const int> changed) {
  auto refresh_reaction = [this](int r) {
    ReactionNode &rx = tree_.reaction(r);
    bool all = !rx.children.empty();
    double cost = rx.cost;
    for (int c: rx.children) {
      const MoleculeNode &child = tree_.molecule(c);
      all = all && child.solved;
      cost += child.best_cost;
    }
    rx.solved = all;
    rx.best_cost = all ? cost : 0.0;
  };
  auto refresh_molecule = [this](int m) {
    MoleculeNode &node = tree_.molecule(m);
    if (node.in_stock) {
      node.solved = true;
      node.best_cost = 0.0;
      return;
    }
    bool solved = false;
    double best = 0.0;
    for (int r: node.reactions) {
      const ReactionNode &rx = tree_.reaction(r);
      if (rx.solved && (!solved || rx.best_cost < best)) {
        best = rx.best_cost;
        solved = true;
      }
    }
    node.solved = solved;
    node.best_cost = best;
  };

  for (int start: changed) {
    for (int r: tree_.molecule(start).reactions)
      refresh_reaction(r);
    int m = start;
    while (true) {
      refresh_molecule(m);
      const int r = tree_.molecule(m).parent;
      if (r < 0)
        break;
      refresh_reaction(r);
      m = tree_.reaction(r).parent;
    }
  }
  return tree_.molecule(0).solved;
}

RouteNode Planner::extract(int molecule) {
  const MoleculeNode &m = tree_.molecule(molecule);
  RouteNode node;
  node.smiles = m.smiles;
  node.in_stock = m.in_stock;
  if (m.in_stock)
    return node;
  if (!m.solved)
    throw Inconsistent("route extraction reached an unsolved molecule");

  int best = -1;
  for (int r: m.reactions) {
    const ReactionNode &rx = tree_.reaction(r);
    if (!rx.solved)
      continue;
    if (best < 0) {
      best = r;
      continue;
    }
    const ReactionNode &cur = tree_.reaction(best);
    if (rx.best_cost < cur.best_cost
        || (rx.best_cost == cur.best_cost && rx.template_id < cur.template_id))
      best = r;
  }
  const ReactionNode &rx = tree_.reaction(best);
  std::vector<MolecularGraph> reactants;
  for (int c: rx.children)
    reactants.push_back(tree_.molecule(c).graph);
  if (!source_.validate(rx.template_id, reactants, m.graph))
    throw Inconsistent("reaction " + rx.template_id + " producing " + m.smiles
                       + " fails forward validation");

  RouteReaction step;
  step.template_id = rx.template_id;
  step.prob = rx.prob;
  step.cost = rx.cost;
  for (int c: rx.children)
    step.reactants.push_back(extract(c));
  node.reaction.push_back(std::move(step));
  return node;
}

Route Planner::extract_route() {
  if (!tree_.molecule(0).solved)
    throw Inconsistent("extract_route needs a solved root");
  Route route;
  route.root = extract(0);
  route.steps = static_cast<int>(route_reactions(route).size());
  route.total_cost = tree_.molecule(0).best_cost;
  return route;
}

bool Planner::done_searching() {
  if (!tree_.molecule(0).solved)
    return false;
  if (config_.stop_at_first_route)
    return true;
  // Any route not yet found passes through a frontier leaf, and costs at
  // least that leaf's J when the heuristic does not overestimate.
  const auto bound = frontier_.min_j();
  return !bound || tree_.molecule(0).best_cost <= *bound;
}

PlanResult Planner::run() {
  PlanResult result;
  result.target = tree_.molecule(0).smiles;
  const double start = clock_();

  auto finish = [&](std::optional<FailureReason> reason) {
    result.stats = stats_;
    if (tree_.molecule(0).solved)
      result.route = extract_route();
    else
      result.failure = Failure { reason.value_or(FailureReason::kExhausted) };
    return result;
  };

  while (true) {
    if (done_searching() || frontier_.empty())
      return finish(FailureReason::kExhausted);
    if (stats_.iterations >= config_.max_iterations)
      return finish(FailureReason::kBudgetIterations);
    if (clock_() - start >= config_.max_seconds)
      return finish(FailureReason::kBudgetTime);

    const int next = select_next();
    ++stats_.iterations;
    expand(next);
    const int changed[] = { next };
    update_solved(changed);
  }
}

PlanResult plan(const MolecularGraph &target, const Stock &stock,
                ExpansionSource &source, HeuristicProvider &heuristic,
                const PlannerConfig &config, std::string context, Clock clock) {
  Planner planner(target, stock, source, heuristic, config,
                  std::move(context), std::move(clock));
  return planner.run();
}

}  // namespace molforge
