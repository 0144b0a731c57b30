//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>

#include "molforge/diffusion.h"
#include "molforge/error.h"

namespace molforge {
namespace {
int edge_category(BondOrder order) {
  switch (order) {
  case BondOrder::kSingle:
    return 1;
  case BondOrder::kDouble:
    return 2;
  case BondOrder::kTriple:
    return 3;
  case BondOrder::kAromatic:
    return 4;
  }
  return 0;
}

BondOrder bond_of_category(int c) {
  switch (c) {
  case 1:
    return BondOrder::kSingle;
  case 2:
    return BondOrder::kDouble;
  case 3:
    return BondOrder::kTriple;
  case 4:
    return BondOrder::kAromatic;
  default:
    throw DecodeError("edge category " + std::to_string(c)
                      + " is not a bond");
  }
}

std::vector<double> one_hot(int width, int hot) {
  std::vector<double> row(width, 0.0);
  row[hot] = 1.0;
  return row;
}

void check_row(std::span<const double> row, int width, const char *what) {
  if (static_cast<int>(row.size()) != width)
    throw DenoiserContract(std::string(what) + " row has width "
                           + std::to_string(row.size()) + ", expected "
                           + std::to_string(width));
  double sum = 0;
  for (double v: row) {
    if (!(v >= 0.0))
      throw DenoiserContract(std::string(what)
                             + " row has a negative or NaN entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw DenoiserContract(std::string(what) + " row sums to "
                           + std::to_string(sum));
}
}  // namespace

TokenGraph empty_tokens(const GraphTokenization &tok, int n_nodes) {
  if (n_nodes < 1 || n_nodes > tok.max_nodes)
    throw std::invalid_argument("node count " + std::to_string(n_nodes)
                                + " outside 1.."
                                + std::to_string(tok.max_nodes));
  TokenGraph x;
  x.n_nodes = n_nodes;
  x.max_nodes = tok.max_nodes;
  x.nodes.assign(n_nodes, 0);
  x.edges.assign(static_cast<std::size_t>(n_nodes) * tok.max_nodes, 0);
  return x;
}

TokenGraph tokenize(const MolecularGraph &g, const GraphTokenization &tok) {
  if (g.atom_count() > tok.max_nodes)
    throw InvalidGraph("graph has more atoms than the tokenization allows");
  TokenGraph x = empty_tokens(tok, g.atom_count());
  for (int i = 0; i < g.atom_count(); ++i) {
    const Atom &a = g.atom(i);
    if (a.charge != 0)
      throw InvalidGraph("charged atoms cannot be tokenized");
    const auto it = std::find(tok.node_vocabulary.begin(),
                              tok.node_vocabulary.end(), a.element);
    if (it == tok.node_vocabulary.end())
      throw InvalidGraph("element " + std::string(element_symbol(a.element))
                         + " is not in the node vocabulary");
    x.nodes[i] = static_cast<int>(it - tok.node_vocabulary.begin());
  }
  for (const Bond &b: g.bonds()) {
    x.edge(b.begin, b.end) = edge_category(b.order);
    x.edge(b.end, b.begin) = edge_category(b.order);
  }
  return x;
}

std::vector<std::vector<double>> one_hot_rows(const TokenGraph &x,
                                              const GraphTokenization &tok) {
  std::vector<std::vector<double>> rows(
      x.n_nodes, std::vector<double>(tok.token_width(), 0.0));
  for (int i = 0; i < x.n_nodes; ++i) {
    rows[i][x.nodes[i]] = 1.0;
    for (int j = 0; j < tok.max_nodes; ++j) {
      const int c = j < x.n_nodes ? x.edge(i, j) : 0;
      rows[i][tok.node_categories() + j * tok.edge_categories() + c] = 1.0;
    }
  }
  return rows;
}

ConditionVector ConditionVector::dropped() const {
  ConditionVector out;
  out.categorical.assign(categorical.size(), std::nullopt);
  out.continuous.assign(continuous.size(), std::nullopt);
  return out;
}

bool ConditionVector::empty() const {
  return !text
         && std::none_of(categorical.begin(), categorical.end(),
                         [](const auto &v) { return v.has_value(); })
         && std::none_of(continuous.begin(), continuous.end(),
                         [](const auto &v) { return v.has_value(); });
}

void check_denoiser_output(const TokenDistributions &p, const TokenGraph &xt,
                           int node_categories, int edge_categories) {
  if (static_cast<int>(p.nodes.size()) != xt.n_nodes
      || p.edges.size() != xt.edges.size())
    throw DenoiserContract("denoiser output has the wrong number of rows");
  for (const auto &row: p.nodes)
    check_row(row, node_categories, "node");
  for (int i = 0; i < xt.n_nodes; ++i) {
    for (int j = 0; j < xt.n_nodes; ++j) {
      if (xt.active(i, j))
        check_row(p.edges[i * xt.max_nodes + j], edge_categories, "edge");
    }
  }
}

OracleDenoiser::OracleDenoiser(TokenGraph x0, const GraphTokenization &tok)
    : x0_(std::move(x0)), node_categories_(tok.node_categories()),
      edge_categories_(tok.edge_categories()) { }

TokenDistributions OracleDenoiser::predict(const TokenGraph &xt, int,
                                           const ConditionVector &) {
  if (xt.n_nodes != x0_.n_nodes || xt.max_nodes != x0_.max_nodes)
    throw DimensionMismatch("oracle denoiser planted a different graph size");
  TokenDistributions p;
  for (int c: x0_.nodes)
    p.nodes.push_back(one_hot(node_categories_, c));
  p.edges.reserve(x0_.edges.size());
  for (int c: x0_.edges)
    p.edges.push_back(one_hot(edge_categories_, c));
  return p;
}

UniformDenoiser::UniformDenoiser(const GraphTokenization &tok)
    : node_categories_(tok.node_categories()),
      edge_categories_(tok.edge_categories()) { }

TokenDistributions UniformDenoiser::predict(const TokenGraph &xt, int,
                                            const ConditionVector &) {
  TokenDistributions p;
  p.nodes.assign(xt.n_nodes, std::vector<double>(node_categories_,
                                                 1.0 / node_categories_));
  p.edges.assign(xt.edges.size(), std::vector<double>(edge_categories_,
                                                      1.0 / edge_categories_));
  return p;
}

ConstantDenoiser::ConstantDenoiser(std::vector<double> node_cond,
                                   std::vector<double> edge_cond,
                                   std::vector<double> node_uncond,
                                   std::vector<double> edge_uncond)
    : node_cond_(std::move(node_cond)), edge_cond_(std::move(edge_cond)),
      node_uncond_(std::move(node_uncond)),
      edge_uncond_(std::move(edge_uncond)) { }

TokenDistributions ConstantDenoiser::predict(const TokenGraph &xt, int,
                                             const ConditionVector &c) {
  const bool uncond = c.empty();
  TokenDistributions p;
  p.nodes.assign(xt.n_nodes, uncond ? node_uncond_ : node_cond_);
  p.edges.assign(xt.edges.size(), uncond ? edge_uncond_ : edge_cond_);
  return p;
}

DecodedGraph decode(const TokenGraph &x, const TokenDistributions *probs,
                    const GraphTokenization &tok) {
  const int n = x.n_nodes;
  if (n < 1)
    throw DecodeError("no nodes to decode");

  // Probability mass the sampler gave to the category a block ended up in.
  auto mass = [&](int i, int j) {
    if (!probs)
      return 0.0;
    const auto &row = probs->edges[i * x.max_nodes + j];
    return row.empty() ? 0.0 : row[x.edge(i, j)];
  };

  TokenGraph sym = x;
  std::vector<Bond> bonds;
  std::vector<bool> aromatic(n, false);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int a = x.edge(i, j), b = x.edge(j, i);
      int c = a;
      if (a != b) {
        const double ma = mass(i, j), mb = mass(j, i);
        c = ma > mb ? a : mb > ma ? b : std::min(a, b);
      }
      sym.edge(i, j) = c;
      sym.edge(j, i) = c;
      if (c == 0)
        continue;
      if (c < 0 || c >= tok.edge_categories())
        throw DecodeError("edge category out of range");
      const BondOrder order = bond_of_category(c);
      bonds.push_back({ i, j, order });
      if (order == BondOrder::kAromatic) {
        aromatic[i] = true;
        aromatic[j] = true;
      }
    }
  }

  std::vector<Atom> atoms(n);
  for (int i = 0; i < n; ++i) {
    if (x.nodes[i] < 0 || x.nodes[i] >= tok.node_categories())
      throw DecodeError("node category out of range");
    atoms[i].element = tok.node_vocabulary[x.nodes[i]];
    atoms[i].aromatic = aromatic[i];
  }
  std::vector<std::vector<BondOrder>> incident(n);
  for (const Bond &b: bonds) {
    incident[b.begin].push_back(b.order);
    incident[b.end].push_back(b.order);
  }
  for (int i = 0; i < n; ++i)
    atoms[i].hydrogens = implicit_hydrogens(atoms[i], incident[i]);

  MolecularGraph g(std::move(atoms), std::move(bonds));
  ValenceReport report = check_valence(g);
  return { std::move(sym), std::move(g), std::move(report) };
}

}  // namespace molforge
