//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molforge/molgraph.h"

#include <algorithm>
#include <array>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "molforge/error.h"

namespace molforge {
namespace {
struct ElementData {
  std::string_view symbol;
  double mass;
};

constexpr std::array<ElementData, kElementCount> kElements = { {
    { "C", 12.011 },
    { "N", 14.007 },
    { "O", 15.999 },
    { "S", 32.06 },
    { "P", 30.974 },
    { "F", 18.998 },
    { "Cl", 35.45 },
    { "Br", 79.904 },
    { "I", 126.904 },
    { "H", 1.008 },
    { "*", 0.0 },
} };
}  // namespace

std::string_view element_symbol(Element e) {
  return kElements[static_cast<int>(e)].symbol;
}

std::optional<Element> element_from_symbol(std::string_view symbol) {
  for (int i = 0; i < kElementCount; ++i) {
    if (kElements[i].symbol == symbol)
      return static_cast<Element>(i);
  }
  return std::nullopt;
}

double atomic_mass(Element e) {
  return kElements[static_cast<int>(e)].mass;
}

double bond_order_value(BondOrder order) {
  switch (order) {
  case BondOrder::kSingle:
    return 1.0;
  case BondOrder::kDouble:
    return 2.0;
  case BondOrder::kTriple:
    return 3.0;
  case BondOrder::kAromatic:
    return 1.5;
  }
  return 1.0;
}

MolecularGraph::MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
  const int n = atom_count();
  if (n < 1)
    throw InvalidGraph("graph must contain at least one atom");

  for (int i = 0; i < n; ++i) {
    const Atom &a = atoms_[i];
    if (a.hydrogens < 0)
      throw InvalidGraph("atom " + std::to_string(i)
                         + " has a negative hydrogen count");
    if (a.element == Element::Star && a.charge != 0)
      throw InvalidGraph("attachment point " + std::to_string(i)
                         + " carries a charge");
  }

  adjacency_.resize(n);
  for (int b = 0; b < bond_count(); ++b) {
    const Bond &bond = bonds_[b];
    if (bond.begin < 0 || bond.begin >= n || bond.end < 0 || bond.end >= n)
      throw InvalidGraph("bond " + std::to_string(b)
                         + " has an out-of-range endpoint");
    if (bond.begin == bond.end)
      throw InvalidGraph("bond " + std::to_string(b) + " is a self loop");
    if (bond.order == BondOrder::kAromatic
        && !(atoms_[bond.begin].aromatic && atoms_[bond.end].aromatic))
      throw InvalidGraph("aromatic bond " + std::to_string(b)
                         + " joins a non-aromatic atom");
    for (const Neighbor &nb: adjacency_[bond.begin]) {
      if (nb.atom == bond.end)
        throw InvalidGraph("duplicate bond between atoms "
                           + std::to_string(bond.begin) + " and "
                           + std::to_string(bond.end));
    }
    adjacency_[bond.begin].push_back({ bond.end, b });
    adjacency_[bond.end].push_back({ bond.begin, b });
  }
}

std::optional<int> MolecularGraph::bond_between(int a, int b) const {
  for (const Neighbor &nb: adjacency_[a]) {
    if (nb.atom == b)
      return nb.bond;
  }
  return std::nullopt;
}

bool MolecularGraph::is_polymer_context() const {
  return std::any_of(atoms_.begin(), atoms_.end(), [](const Atom &a) {
    return a.element == Element::Star;
  });
}

MolecularGraph MolecularGraph::permuted(std::span<const int> perm) const {
  if (static_cast<int>(perm.size()) != atom_count())
    throw InvalidGraph("permutation size does not match atom count");

  std::vector<Atom> atoms(atoms_.size());
  for (int i = 0; i < atom_count(); ++i)
    atoms[perm[i]] = atoms_[i];

  std::vector<Bond> bonds;
  bonds.reserve(bonds_.size());
  for (const Bond &b: bonds_)
    bonds.push_back({ perm[b.begin], perm[b.end], b.order });
  return MolecularGraph(std::move(atoms), std::move(bonds));
}

std::vector<int> MolecularGraph::component_labels(int *count) const {
  std::vector<int> label(atoms_.size(), -1);
  int next = 0;
  std::vector<int> stack;
  for (int s = 0; s < atom_count(); ++s) {
    if (label[s] >= 0)
      continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const Neighbor &nb: adjacency_[u]) {
        if (label[nb.atom] < 0) {
          label[nb.atom] = next;
          stack.push_back(nb.atom);
        }
      }
    }
    ++next;
  }
  if (count != nullptr)
    *count = next;
  return label;
}

std::vector<MolecularGraph> MolecularGraph::split_components() const {
  int count = 0;
  const std::vector<int> label = component_labels(&count);
  if (count == 1)
    return { *this };

  std::vector<int> local(atoms_.size());
  std::vector<std::vector<Atom>> atoms(count);
  std::vector<std::vector<Bond>> bonds(count);
  for (int i = 0; i < atom_count(); ++i) {
    local[i] = static_cast<int>(atoms[label[i]].size());
    atoms[label[i]].push_back(atoms_[i]);
  }
  for (const Bond &b: bonds_)
    bonds[label[b.begin]].push_back({ local[b.begin], local[b.end], b.order });

  std::vector<MolecularGraph> out;
  out.reserve(count);
  for (int c = 0; c < count; ++c)
    out.emplace_back(std::move(atoms[c]), std::move(bonds[c]));
  return out;
}

std::vector<BondOrder> MolecularGraph::incident_orders(int atom) const {
  std::vector<BondOrder> orders;
  orders.reserve(adjacency_[atom].size());
  for (const Neighbor &nb: adjacency_[atom])
    orders.push_back(bonds_[nb.bond].order);
  return orders;
}

nlohmann::json graph_to_json(const MolecularGraph &g) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const Atom &a: g.atoms()) {
    atoms.push_back({
        { "el", element_symbol(a.element) },
        { "charge", a.charge },
        { "aromatic", a.aromatic },
        { "h", a.hydrogens },
    });
  }
  nlohmann::json bonds = nlohmann::json::array();
  for (const Bond &b: g.bonds()) {
    if (b.order == BondOrder::kAromatic)
      bonds.push_back({ b.begin, b.end, 1.5 });
    else
      bonds.push_back({ b.begin, b.end, static_cast<int>(b.order) });
  }
  return { { "atoms", std::move(atoms) }, { "bonds", std::move(bonds) } };
}

MolecularGraph graph_from_json(const nlohmann::json &j) {
  try {
    std::vector<Atom> atoms;
    for (const auto &ja: j.at("atoms")) {
      Atom a;
      const std::string sym = ja.at("el").get<std::string>();
      const auto el = element_from_symbol(sym);
      if (!el)
        throw InvalidGraph("unsupported element '" + sym + "'");
      a.element = *el;
      a.charge = ja.value("charge", 0);
      a.aromatic = ja.value("aromatic", false);
      a.hydrogens = ja.value("h", 0);
      atoms.push_back(a);
    }

    std::vector<Bond> bonds;
    for (const auto &jb: j.at("bonds")) {
      if (!jb.is_array() || jb.size() != 3)
        throw InvalidGraph("bond entries must be [i, j, order]");
      const double order = jb[2].get<double>();
      BondOrder bo;
      if (order == 1.0)
        bo = BondOrder::kSingle;
      else if (order == 2.0)
        bo = BondOrder::kDouble;
      else if (order == 3.0)
        bo = BondOrder::kTriple;
      else if (order == 1.5)
        bo = BondOrder::kAromatic;
      else
        throw InvalidGraph("bond order must be one of 1, 2, 3, 1.5");
      bonds.push_back({ jb[0].get<int>(), jb[1].get<int>(), bo });
    }
    return MolecularGraph(std::move(atoms), std::move(bonds));
  } catch (const nlohmann::json::exception &e) {
    throw InvalidGraph(std::string("malformed graph JSON: ") + e.what());
  }
}

}  // namespace molforge
