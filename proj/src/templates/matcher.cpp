//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>

#include "molforge/error.h"
#include "molforge/templates.h"

namespace molforge {
namespace {
int total_hydrogens(const MolecularGraph &g, int atom) {
  int h = g.atom(atom).hydrogens;
  for (const Neighbor &nb: g.neighbors(atom)) {
    if (g.atom(nb.atom).element == Element::H)
      ++h;
  }
  return h;
}

class Matcher {
public:
  Matcher(const PatternGraph &p, const MolecularGraph &g, std::size_t budget)
      : p_(p), g_(g), budget_(budget), rings_(perceive_rings(g)),
        candidates_(p.atom_count()), map_(p.atom_count(), -1),
        used_(g.atom_count(), false) {
    for (int q = 0; q < p.atom_count(); ++q) {
      for (int a = 0; a < g.atom_count(); ++a) {
        if (g.degree(a) >= static_cast<int>(p.neighbors(q).size())
            && atom_matches(p.atom(q), g, a, rings_))
          candidates_[q].push_back(a);
      }
    }
    plan_order();
  }

  std::vector<MatchEmbedding> run() {
    for (const auto &c: candidates_) {
      if (c.empty())
        return {};
    }
    extend(0);
    std::sort(found_.begin(), found_.end(),
              [](const MatchEmbedding &a, const MatchEmbedding &b) {
                return a.atoms < b.atoms;
              });
    return std::move(found_);
  }

private:
  // Rarest pattern atom first, then repeatedly the atom with the most bonds
  // into the already ordered set (ties: fewer candidates, lower index).
  void plan_order() {
    const int n = p_.atom_count();
    std::vector<bool> placed(n, false);
    std::vector<int> links(n, 0);
    while (static_cast<int>(order_.size()) < n) {
      int best = -1;
      for (int q = 0; q < n; ++q) {
        if (placed[q])
          continue;
        if (best < 0 || links[q] > links[best]
            || (links[q] == links[best]
                && candidates_[q].size() < candidates_[best].size()))
          best = q;
      }
      placed[best] = true;
      order_.push_back(best);
      for (const Neighbor &nb: p_.neighbors(best))
        ++links[nb.atom];
    }
  }

  bool consistent(int q, int a) const {
    for (const Neighbor &nb: p_.neighbors(q)) {
      const int other = map_[nb.atom];
      if (other < 0)
        continue;
      const auto bond = g_.bond_between(a, other);
      if (!bond
          || !bond_matches(p_.bond(nb.bond).order, g_.bond(*bond).order))
        return false;
    }
    return true;
  }

  void extend(std::size_t depth) {
    if (depth == order_.size()) {
      found_.push_back({ map_ });
      return;
    }
    const int q = order_[depth];
    for (int a: candidates_[q]) {
      if (used_[a] || !consistent(q, a))
        continue;
      if (++expansions_ > budget_)
        throw MatchBudgetExceeded("subgraph match exceeded "
                                  + std::to_string(budget_) + " expansions");
      map_[q] = a;
      used_[a] = true;
      extend(depth + 1);
      used_[a] = false;
      map_[q] = -1;
    }
  }

  const PatternGraph &p_;
  const MolecularGraph &g_;
  std::size_t budget_;
  std::size_t expansions_ = 0;
  RingInfo rings_;
  std::vector<std::vector<int>> candidates_;
  std::vector<int> order_;
  std::vector<int> map_;
  std::vector<bool> used_;
  std::vector<MatchEmbedding> found_;
};
}  // namespace

bool atom_matches(const AtomQuery &q, const MolecularGraph &g, int atom,
                  const RingInfo &rings) {
  const Atom &a = g.atom(atom);
  if (q.element && *q.element != a.element)
    return false;
  if (q.aromatic && *q.aromatic != a.aromatic)
    return false;
  if (q.in_ring && *q.in_ring != static_cast<bool>(rings.atom_in_ring[atom]))
    return false;
  if (q.degree && *q.degree != g.degree(atom))
    return false;
  if (q.charge && *q.charge != a.charge)
    return false;
  if (q.hydrogens && *q.hydrogens != total_hydrogens(g, atom))
    return false;
  return true;
}

std::vector<MatchEmbedding> find_matches(const PatternGraph &pattern,
                                         const MolecularGraph &g,
                                         std::size_t limit,
                                         std::size_t budget) {
  if (pattern.empty() || limit == 0)
    return {};
  std::vector<MatchEmbedding> all = Matcher(pattern, g, budget).run();
  if (all.size() > limit)
    all.resize(limit);
  return all;
}

}  // namespace molforge
