//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "molforge/error.h"
#include "molforge/templates.h"

namespace molforge {
namespace {
struct BondKey {
  int a, b;

  BondKey(int x, int y): a(std::min(x, y)), b(std::max(x, y)) { }
  friend auto operator<=>(const BondKey &, const BondKey &) = default;
};

std::optional<BondOrder> concrete_order(BondQuery q) {
  switch (q) {
  case BondQuery::kSingle:
    return BondOrder::kSingle;
  case BondQuery::kDouble:
    return BondOrder::kDouble;
  case BondQuery::kTriple:
    return BondOrder::kTriple;
  case BondQuery::kAromatic:
    return BondOrder::kAromatic;
  default:
    return std::nullopt;
  }
}

int valence_of(const Atom &atom, const std::vector<BondOrder> &incident) {
  return bonded_valence(atom, incident);
}

// Rewrites one embedding. Returns nullopt when the result is not a valid
// set of molecules.
std::optional<ReactantSet> rewrite(const RetroTemplate &t,
                                   const MolecularGraph &product,
                                   const MatchEmbedding &match) {
  const int n = product.atom_count();

  // Product atom -> its map label (core atoms only).
  std::vector<int> label(n, 0);
  std::map<int, int> atom_of_label;
  for (int p = 0; p < t.product.atom_count(); ++p) {
    label[match.atoms[p]] = t.product.atom(p).map;
    atom_of_label[t.product.atom(p).map] = match.atoms[p];
  }

  // Where each label lands on the reactant side.
  std::map<int, const AtomQuery *> reactant_query;
  for (const PatternGraph &r: t.reactants) {
    for (const AtomQuery &q: r.atoms()) {
      if (q.map)
        reactant_query[q.map] = &q;
    }
  }

  // Surviving product atoms keep their relative order; fresh atoms follow.
  std::vector<int> new_index(n, -1);
  std::vector<Atom> atoms;
  for (int i = 0; i < n; ++i) {
    if (label[i] && !reactant_query.count(label[i]))
      continue;
    new_index[i] = static_cast<int>(atoms.size());
    atoms.push_back(product.atom(i));
  }

  std::set<BondKey> pattern_bonds;
  for (const PatternBond &pb: t.product.bonds())
    pattern_bonds.insert(BondKey(match.atoms[pb.begin], match.atoms[pb.end]));

  std::map<BondKey, BondOrder> bonds;
  for (const Bond &b: product.bonds()) {
    if (pattern_bonds.count(BondKey(b.begin, b.end)))
      continue;
    const int u = new_index[b.begin], v = new_index[b.end];
    if (u < 0 || v < 0)
      continue;
    bonds[BondKey(u, v)] = b.order;
  }

  std::vector<bool> fresh;
  fresh.assign(atoms.size(), false);
  std::vector<std::optional<int>> fixed_h(atoms.size());

  for (const PatternGraph &r: t.reactants) {
    std::vector<int> idx(r.atom_count());
    for (int k = 0; k < r.atom_count(); ++k) {
      const AtomQuery &q = r.atom(k);
      if (q.map) {
        idx[k] = new_index[atom_of_label.at(q.map)];
        Atom &a = atoms[idx[k]];
        if (q.element)
          a.element = *q.element;
        if (q.aromatic)
          a.aromatic = *q.aromatic;
        if (q.charge)
          a.charge = *q.charge;
      } else {
        idx[k] = static_cast<int>(atoms.size());
        atoms.push_back(Atom { *q.element, q.charge.value_or(0),
                               q.aromatic.value_or(false), 0 });
        fresh.push_back(true);
        fixed_h.emplace_back();
      }
      if (q.hydrogens)
        fixed_h[idx[k]] = *q.hydrogens;
    }
    for (const PatternBond &pb: r.bonds()) {
      const int u = idx[pb.begin], v = idx[pb.end];
      BondOrder order;
      if (const auto c = concrete_order(pb.order)) {
        order = *c;
      } else {
        const int pu = r.atom(pb.begin).map ? atom_of_label.at(r.atom(pb.begin).map) : -1;
        const int pv = r.atom(pb.end).map ? atom_of_label.at(r.atom(pb.end).map) : -1;
        const auto old = pu >= 0 && pv >= 0 ? product.bond_between(pu, pv)
                                            : std::nullopt;
        if (old)
          order = product.bond(*old).order;
        else if (atoms[u].aromatic && atoms[v].aromatic)
          order = BondOrder::kAromatic;
        else
          order = BondOrder::kSingle;
      }
      bonds[BondKey(u, v)] = order;
    }
  }

  std::vector<std::vector<BondOrder>> incident(atoms.size());
  std::vector<Bond> bond_list;
  for (const auto &[key, order]: bonds) {
    bond_list.push_back({ key.a, key.b, order });
    incident[key.a].push_back(order);
    incident[key.b].push_back(order);
  }

  // Hydrogen bookkeeping: explicit counts from the pattern win; otherwise a
  // carried atom keeps its total valence, and fresh or re-charged atoms are
  // filled like organic-subset SMILES atoms.
  for (int i = 0; i < n; ++i) {
    const int j = new_index[i];
    if (j < 0 || !label[i])
      continue;
    if (fixed_h[j]) {
      atoms[j].hydrogens = *fixed_h[j];
      continue;
    }
    const Atom &old = product.atom(i);
    if (old.charge != atoms[j].charge || old.element != atoms[j].element) {
      atoms[j].hydrogens = implicit_hydrogens(atoms[j], incident[j]);
      continue;
    }
    const int before = valence_of(old, product.incident_orders(i));
    const int after = valence_of(atoms[j], incident[j]);
    atoms[j].hydrogens = std::max(0, old.hydrogens + before - after);
  }
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (!fresh[j])
      continue;
    atoms[j].hydrogens =
        fixed_h[j] ? *fixed_h[j] : implicit_hydrogens(atoms[j], incident[j]);
  }

  try {
    const MolecularGraph whole(std::move(atoms), std::move(bond_list));
    ReactantSet parts = whole.split_components();
    for (const MolecularGraph &part: parts) {
      if (!check_valence(part).valid)
        return std::nullopt;
    }
    return parts;
  } catch (const InvalidGraph &) {
    return std::nullopt;
  }
}
}  // namespace

std::vector<std::string>
reactant_set_keys(std::span<const MolecularGraph> set) {
  std::vector<std::string> keys;
  keys.reserve(set.size());
  for (const MolecularGraph &g: set)
    keys.push_back(canonical_key(g));
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::vector<ReactantSet> apply_retro(const RetroTemplate &t,
                                     const MolecularGraph &product) {
  if (t.product.empty())
    throw TemplateUnsupported("template " + t.id + " has an empty product");
  for (const AtomQuery &q: t.product.atoms()) {
    if (q.map == 0)
      throw TemplateUnsupported("template " + t.id
                                + ": every product atom needs a map label");
  }

  std::vector<ReactantSet> out;
  std::set<std::vector<std::string>> seen;
  for (const MatchEmbedding &m: find_matches(t.product, product)) {
    auto set = rewrite(t, product, m);
    if (!set)
      continue;
    if (seen.insert(reactant_set_keys(*set)).second)
      out.push_back(std::move(*set));
  }
  return out;
}

bool validate_forward(const RetroTemplate &t,
                      std::span<const MolecularGraph> reactants,
                      const MolecularGraph &product) {
  const std::vector<std::string> want = reactant_set_keys(reactants);
  for (const ReactantSet &set: apply_retro(t, product)) {
    if (reactant_set_keys(set) == want)
      return true;
  }
  return false;
}

}  // namespace molforge
