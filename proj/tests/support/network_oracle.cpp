//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "network_oracle.h"

#include <algorithm>
#include <cmath>

#include "molforge/chemio.h"

namespace molforge::test {

MolecularGraph distinct_molecule(int i) {
  static std::vector<std::string> cache;
  static long next = 0;
  static const char letters[] = { 'C', 'N', 'O' };
  while (static_cast<int>(cache.size()) <= i) {
    // Bijective base-3 numbering enumerates every length in turn.
    std::string s;
    for (long c = next++; c >= 0; c = c / 3 - 1)
      s.push_back(letters[c % 3]);
    // A chain and its reversal are the same molecule.
    if (std::string(s.rbegin(), s.rend()) < s)
      continue;
    if (s.find('C') == std::string::npos || s.find("OO") != std::string::npos
        || s.find("NO") != std::string::npos || s.find("ON") != std::string::npos
        || s.find("NN") != std::string::npos)
      continue;
    cache.push_back(s);
  }
  return parse_smiles(cache[i]);
}

SyntheticNetwork::SyntheticNetwork(int molecules,
                                   std::vector<std::vector<Reaction>> reactions,
                                   std::vector<int> stock)
    : reactions_(std::move(reactions)), in_stock_(molecules, false) {
  reactions_.resize(molecules);
  for (int i = 0; i < molecules; ++i) {
    molecules_.push_back(distinct_molecule(i));
    index_[canonical_key(molecules_.back())] = i;
  }
  for (int s: stock) {
    in_stock_[s] = true;
    stock_.insert(molecules_[s]);
  }
}

SyntheticNetwork SyntheticNetwork::random(std::mt19937_64 &rng,
                                          int max_molecules) {
  std::uniform_real_distribution<double> prob(0.02, 1.0);
  while (true) {
    const int n = 10 + static_cast<int>(rng() % (max_molecules - 9));
    std::vector<std::vector<Reaction>> reactions(n);
    std::vector<int> stock;
    int counter = 0;
    for (int i = 0; i < n; ++i) {
      const bool leafish = i > n * 3 / 4;
      if ((leafish || rng() % 5 == 0) && i > 0) {
        stock.push_back(i);
        continue;
      }
      if (i == n - 1)
        continue;
      const int count = static_cast<int>(rng() % 5);
      for (int r = 0; r < count; ++r) {
        Reaction rx;
        rx.id = "r" + std::to_string(counter++);
        rx.prob = prob(rng);
        const int arity = 1 + static_cast<int>(rng() % 3);
        for (int a = 0; a < arity; ++a) {
          const int child = i + 1 + static_cast<int>(rng() % (n - i - 1));
          if (std::find(rx.children.begin(), rx.children.end(), child)
              == rx.children.end())
            rx.children.push_back(child);
        }
        reactions[i].push_back(std::move(rx));
      }
    }
    SyntheticNetwork net(n, std::move(reactions), std::move(stock));
    if (std::isfinite(net.optimum(0)) && !net.in_stock_[0])
      return net;
  }
}

std::vector<ReactionProposal>
SyntheticNetwork::expand(const MolecularGraph &product, std::string_view,
                         int k, ExpansionStats &stats) {
  ++stats.predictor_calls;
  const auto it = index_.find(canonical_key(product));
  if (it == index_.end())
    return {};
  std::vector<Reaction> list = reactions_[it->second];
  std::stable_sort(list.begin(), list.end(),
                   [](const Reaction &a, const Reaction &b) {
                     return a.prob > b.prob;
                   });
  if (static_cast<int>(list.size()) > k)
    list.resize(k);
  std::vector<ReactionProposal> out;
  for (const Reaction &r: list) {
    ++stats.proposals;
    ++stats.reactions;
    ReactantSet set;
    for (int c: r.children)
      set.push_back(molecules_[c]);
    out.push_back({ r.id, r.prob, std::move(set) });
  }
  return out;
}

bool SyntheticNetwork::validate(const std::string &template_id,
                                std::span<const MolecularGraph> reactants,
                                const MolecularGraph &product) {
  const auto it = index_.find(canonical_key(product));
  if (it == index_.end())
    return false;
  for (const Reaction &r: reactions_[it->second]) {
    if (r.id != template_id || r.children.size() != reactants.size())
      continue;
    for (std::size_t i = 0; i < reactants.size(); ++i) {
      if (canonical_key(reactants[i]) != canonical_key(molecules_[r.children[i]]))
        return false;
    }
    return true;
  }
  return false;
}

double SyntheticNetwork::optimum(int i) const {
  if (in_stock_[i])
    return 0.0;
  if (const auto it = memo_.find(i); it != memo_.end())
    return it->second;
  double best = std::numeric_limits<double>::infinity();
  for (const Reaction &r: reactions_[i]) {
    double cost = -std::log(r.prob);
    for (int c: r.children)
      cost += optimum(c);
    best = std::min(best, cost);
  }
  memo_[i] = best;
  return best;
}

}  // namespace molforge::test
