//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "molforge/error.h"
#include "molforge/molgraph.h"

namespace molforge {
namespace {
// Search beyond this many complete labelings falls back to first-choice
// individualization.
constexpr int kLeafBudget = 2048;

using Ranks = std::vector<int>;

// Competition ranking: each atom gets the number of atoms whose key sorts
// strictly before its own, so tied atoms share the class's lowest rank.
template <class Key>
Ranks rank_by(const std::vector<Key> &keys) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return keys[a] < keys[b]; });
  Ranks rank(n);
  for (int i = 0; i < n; ++i) {
    if (i > 0 && keys[order[i]] == keys[order[i - 1]])
      rank[order[i]] = rank[order[i - 1]];
    else
      rank[order[i]] = i;
  }
  return rank;
}

int class_count(const Ranks &rank) {
  std::vector<int> r = rank;
  std::sort(r.begin(), r.end());
  return static_cast<int>(std::unique(r.begin(), r.end()) - r.begin());
}

class Canonicalizer {
public:
  explicit Canonicalizer(const MolecularGraph &g): g_(g) { }

  CanonicalLabeling run() {
    std::vector<std::tuple<int, int, int, int, int>> init(g_.atom_count());
    for (int i = 0; i < g_.atom_count(); ++i) {
      const Atom &a = g_.atom(i);
      init[i] = { static_cast<int>(a.element), a.charge, a.aromatic ? 1 : 0,
                  a.hydrogens, g_.degree(i) };
    }
    search(refine(rank_by(init)));
    return { best_rank_, best_key_ };
  }

private:
  Ranks refine(Ranks rank) const {
    int classes = class_count(rank);
    while (classes < g_.atom_count()) {
      std::vector<std::pair<int, std::vector<std::pair<int, int>>>> sig(
          g_.atom_count());
      for (int i = 0; i < g_.atom_count(); ++i) {
        sig[i].first = rank[i];
        for (const Neighbor &nb: g_.neighbors(i)) {
          sig[i].second.emplace_back(
              rank[nb.atom], static_cast<int>(g_.bond(nb.bond).order));
        }
        std::sort(sig[i].second.begin(), sig[i].second.end());
      }
      Ranks next = rank_by(sig);
      const int next_classes = class_count(next);
      rank = std::move(next);
      if (next_classes == classes)
        break;
      classes = next_classes;
    }
    return rank;
  }

  std::string serialize(const Ranks &rank) const {
    const int n = g_.atom_count();
    std::vector<int> atom_at(n);
    for (int i = 0; i < n; ++i)
      atom_at[rank[i]] = i;

    std::string out;
    for (int r = 0; r < n; ++r) {
      const Atom &a = g_.atom(atom_at[r]);
      out += element_symbol(a.element);
      if (a.aromatic)
        out += 'a';
      if (a.charge != 0)
        out += (a.charge > 0 ? "+" : "") + std::to_string(a.charge);
      if (a.hydrogens != 0)
        out += 'H' + std::to_string(a.hydrogens);
      out += ';';
    }

    std::vector<std::tuple<int, int, int>> edges;
    edges.reserve(g_.bond_count());
    for (const Bond &b: g_.bonds()) {
      int x = rank[b.begin], y = rank[b.end];
      if (x > y)
        std::swap(x, y);
      edges.emplace_back(x, y, static_cast<int>(b.order));
    }
    std::sort(edges.begin(), edges.end());
    out += '|';
    for (const auto &[x, y, o]: edges) {
      out += std::to_string(x) + '-' + std::to_string(y);
      if (o != 1)
        out += (o == 4 ? ":" : o == 2 ? "=" : "#");
      out += ',';
    }
    return out;
  }

  void search(const Ranks &rank) {
    const int n = g_.atom_count();
    if (class_count(rank) == n) {
      ++leaves_;
      std::string key = serialize(rank);
      if (best_key_.empty() || key < best_key_) {
        best_key_ = std::move(key);
        best_rank_ = rank;
      }
      return;
    }

    // First (lowest-ranked) non-singleton class.
    std::vector<int> count(n, 0);
    for (int r: rank)
      ++count[r];
    int target = -1;
    for (int r = 0; r < n && target < 0; ++r) {
      if (count[r] > 1)
        target = r;
    }

    for (int i = 0; i < n; ++i) {
      if (rank[i] != target)
        continue;
      Ranks split = rank;
      for (int j = 0; j < n; ++j) {
        if (split[j] == target && j != i)
          split[j] = target + 1;
      }
      search(refine(std::move(split)));
      if (leaves_ >= kLeafBudget)
        return;
    }
  }

  const MolecularGraph &g_;
  int leaves_ = 0;
  Ranks best_rank_;
  std::string best_key_;
};
}  // namespace

CanonicalLabeling canonical_labeling(const MolecularGraph &g) {
  return Canonicalizer(g).run();
}

std::string canonical_key(const MolecularGraph &g) {
  return canonical_labeling(g).key;
}

}  // namespace molforge
