//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "molforge/molgraph.h"

namespace molforge {
namespace {
std::vector<bool> find_ring_bonds(const MolecularGraph &g) {
  const int n = g.atom_count();
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<bool> in_ring(g.bond_count(), true);
  int timer = 0;

  std::function<void(int, int)> dfs = [&](int u, int parent_bond) {
    disc[u] = low[u] = timer++;
    for (const Neighbor &nb: g.neighbors(u)) {
      if (nb.bond == parent_bond)
        continue;
      if (disc[nb.atom] >= 0) {
        low[u] = std::min(low[u], disc[nb.atom]);
      } else {
        dfs(nb.atom, nb.bond);
        low[u] = std::min(low[u], low[nb.atom]);
        if (low[nb.atom] > disc[u])
          in_ring[nb.bond] = false;
      }
    }
  };
  for (int s = 0; s < n; ++s) {
    if (disc[s] < 0)
      dfs(s, -1);
  }
  return in_ring;
}

using EdgeSet = std::vector<std::uint64_t>;

struct Candidate {
  EdgeSet edges;
  std::vector<int> atoms;
  std::vector<int> bonds;
};

// Horton candidate cycles: shortest paths from every vertex closed by one
// edge. The set is guaranteed to contain a minimum cycle basis.
std::vector<Candidate> horton_candidates(const MolecularGraph &g,
                                         const std::vector<bool> &ring_bond) {
  const int n = g.atom_count();
  const int words = (g.bond_count() + 63) / 64;
  std::vector<Candidate> out;

  for (int root = 0; root < n; ++root) {
    std::vector<int> parent(n, -1), parent_bond(n, -1), dist(n, -1);
    std::queue<int> q;
    dist[root] = 0;
    q.push(root);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const Neighbor &nb: g.neighbors(u)) {
        if (!ring_bond[nb.bond] || dist[nb.atom] >= 0)
          continue;
        dist[nb.atom] = dist[u] + 1;
        parent[nb.atom] = u;
        parent_bond[nb.atom] = nb.bond;
        q.push(nb.atom);
      }
    }

    auto path_to_root = [&](int v, std::vector<int> &atoms,
                            std::vector<int> &bonds) {
      atoms.clear();
      bonds.clear();
      while (v != root) {
        atoms.push_back(v);
        bonds.push_back(parent_bond[v]);
        v = parent[v];
      }
      atoms.push_back(root);
    };

    std::vector<int> ax, bx, ay, by;
    for (int b = 0; b < g.bond_count(); ++b) {
      if (!ring_bond[b])
        continue;
      const Bond &bond = g.bond(b);
      const int x = bond.begin, y = bond.end;
      if (dist[x] < 0 || dist[y] < 0)
        continue;
      if (parent_bond[x] == b || parent_bond[y] == b)
        continue;
      path_to_root(x, ax, bx);
      path_to_root(y, ay, by);
      // Paths must meet only at the root.
      bool disjoint = true;
      for (std::size_t i = 0; i + 1 < ax.size() && disjoint; ++i) {
        if (std::find(ay.begin(), ay.end() - 1, ax[i]) != ay.end() - 1)
          disjoint = false;
      }
      if (!disjoint)
        continue;

      Candidate c;
      c.edges.assign(words, 0);
      // atoms: root .. x then y .. (excluding root)
      c.atoms.assign(ax.rbegin(), ax.rend());
      for (std::size_t i = 0; i + 1 < ay.size(); ++i)
        c.atoms.push_back(ay[i]);
      c.bonds = bx;
      c.bonds.push_back(b);
      c.bonds.insert(c.bonds.end(), by.begin(), by.end());
      for (int e: c.bonds)
        c.edges[e / 64] |= std::uint64_t { 1 } << (e % 64);
      out.push_back(std::move(c));
    }
  }

  std::sort(out.begin(), out.end(), [](const Candidate &a, const Candidate &b) {
    if (a.bonds.size() != b.bonds.size())
      return a.bonds.size() < b.bonds.size();
    return a.edges < b.edges;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Candidate &a, const Candidate &b) {
                          return a.edges == b.edges;
                        }),
            out.end());
  return out;
}

// Normalized ring atom order: start at the smallest index, walk toward the
// smaller neighbor.
std::vector<int> normalize_ring(std::vector<int> atoms) {
  const auto it = std::min_element(atoms.begin(), atoms.end());
  std::rotate(atoms.begin(), it, atoms.end());
  if (atoms.size() > 2 && atoms.back() < atoms[1])
    std::reverse(atoms.begin() + 1, atoms.end());
  return atoms;
}
}  // namespace

RingInfo perceive_rings(const MolecularGraph &g) {
  RingInfo info;
  int components = 0;
  g.component_labels(&components);
  info.cyclomatic_number = g.bond_count() - g.atom_count() + components;
  info.bond_in_ring = find_ring_bonds(g);
  info.atom_in_ring.assign(g.atom_count(), false);
  for (int b = 0; b < g.bond_count(); ++b) {
    if (info.bond_in_ring[b]) {
      info.atom_in_ring[g.bond(b).begin] = true;
      info.atom_in_ring[g.bond(b).end] = true;
    }
  }
  if (info.cyclomatic_number == 0)
    return info;

  // Gaussian elimination over GF(2), shortest candidates first.
  std::vector<Candidate> candidates = horton_candidates(g, info.bond_in_ring);
  std::vector<EdgeSet> basis;
  std::vector<int> pivots;
  for (Candidate &c: candidates) {
    if (static_cast<int>(info.rings.size()) == info.cyclomatic_number)
      break;
    EdgeSet v = c.edges;
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const int p = pivots[k];
      if ((v[p / 64] >> (p % 64)) & 1U) {
        for (std::size_t w = 0; w < v.size(); ++w)
          v[w] ^= basis[k][w];
      }
    }
    int pivot = -1;
    for (std::size_t w = 0; w < v.size() && pivot < 0; ++w) {
      if (v[w] != 0)
        pivot = static_cast<int>(w * 64) + __builtin_ctzll(v[w]);
    }
    if (pivot < 0)
      continue;
    basis.push_back(std::move(v));
    pivots.push_back(pivot);
    std::vector<int> bonds = c.bonds;
    std::sort(bonds.begin(), bonds.end());
    info.rings.push_back(normalize_ring(std::move(c.atoms)));
    info.ring_bonds.push_back(std::move(bonds));
  }
  return info;
}

}  // namespace molforge
