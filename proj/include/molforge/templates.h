//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_TEMPLATES_H_
#define MOLFORGE_TEMPLATES_H_

#include <cstddef>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "molforge/chemio.h"
#include "molforge/molgraph.h"

namespace molforge {

/// Retro transform: a mapped product pattern rewritten into one or more
/// reactant patterns. Every product atom carries a map label; reactant atoms
/// either reuse a product label (at most once across all reactants) or are
/// created fresh and then need a concrete element.
struct RetroTemplate {
  std::string id;
  PatternGraph product;
  std::vector<PatternGraph> reactants;
  double prior = 1.0;
};

// Throws TemplateUnsupported when the patterns fall outside the rewrite
// semantics, and the parser errors for malformed SMARTS.
RetroTemplate make_template(std::string id, std::string_view product,
                            std::span<const std::string> reactants,
                            double prior = 1.0);

// JSON lines {"id","product","reactants":[...],"prior"}. Errors name the
// line and keep the parser's position.
std::vector<RetroTemplate>
load_templates(const std::filesystem::path &path);

inline constexpr std::size_t kDefaultMatchBudget = 1'000'000;

struct MatchEmbedding {
  // atoms[p] is the molecule atom matched by pattern atom p.
  std::vector<int> atoms;

  friend bool operator==(const MatchEmbedding &,
                         const MatchEmbedding &) = default;
};

bool atom_matches(const AtomQuery &query, const MolecularGraph &g, int atom,
                  const RingInfo &rings);

/// All injective embeddings of the pattern, sorted lexicographically by the
/// matched atom tuple and truncated to `limit`. Automorphic images are kept.
/// Throws MatchBudgetExceeded after `budget` search-node expansions.
std::vector<MatchEmbedding>
find_matches(const PatternGraph &pattern, const MolecularGraph &g,
             std::size_t limit = std::numeric_limits<std::size_t>::max(),
             std::size_t budget = kDefaultMatchBudget);

using ReactantSet = std::vector<MolecularGraph>;

// Sorted canonical keys; two reactant sets are the same proposal iff these
// are equal.
std::vector<std::string> reactant_set_keys(std::span<const MolecularGraph> set);

/// One reactant set per distinct, valence-valid rewrite of a product match,
/// in match order.
std::vector<ReactantSet> apply_retro(const RetroTemplate &t,
                                     const MolecularGraph &product);

bool validate_forward(const RetroTemplate &t,
                      std::span<const MolecularGraph> reactants,
                      const MolecularGraph &product);

}  // namespace molforge

#endif  // MOLFORGE_TEMPLATES_H_
