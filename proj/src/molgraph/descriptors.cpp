//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>

#include "molforge/error.h"
#include "molforge/molgraph.h"

namespace molforge {
namespace {
int heavy_degree(const MolecularGraph &g, int atom) {
  int d = 0;
  for (const Neighbor &nb: g.neighbors(atom)) {
    if (is_heavy(g.atom(nb.atom).element))
      ++d;
  }
  return d;
}

int total_hydrogens(const MolecularGraph &g, int atom) {
  int h = g.atom(atom).hydrogens;
  for (const Neighbor &nb: g.neighbors(atom)) {
    if (g.atom(nb.atom).element == Element::H)
      ++h;
  }
  return h;
}
}  // namespace

Descriptors descriptors(const MolecularGraph &g) {
  if (!check_valence(g).valid)
    throw InvalidGraph("descriptors require a valence-valid graph");

  Descriptors d;
  const RingInfo rings = perceive_rings(g);
  d.ring_count = rings.cyclomatic_number;

  for (std::size_t r = 0; r < rings.rings.size(); ++r) {
    const bool atoms_aromatic =
        std::all_of(rings.rings[r].begin(), rings.rings[r].end(),
                    [&](int a) { return g.atom(a).aromatic; });
    const bool bonds_aromatic = std::all_of(
        rings.ring_bonds[r].begin(), rings.ring_bonds[r].end(),
        [&](int b) { return g.bond(b).order == BondOrder::kAromatic; });
    if (atoms_aromatic && bonds_aromatic)
      ++d.aromatic_ring_count;
  }

  for (int i = 0; i < g.atom_count(); ++i) {
    const Atom &a = g.atom(i);
    d.molecular_weight += atomic_mass(a.element)
                          + a.hydrogens * atomic_mass(Element::H);
    if (a.element == Element::Star)
      ++d.attachment_points;
    if (a.element == Element::N || a.element == Element::O) {
      if (total_hydrogens(g, i) > 0)
        ++d.h_donors;
      if (a.charge <= 0)
        ++d.h_acceptors;
    }
  }

  for (int b = 0; b < g.bond_count(); ++b) {
    const Bond &bond = g.bond(b);
    if (bond.order != BondOrder::kSingle || rings.bond_in_ring[b])
      continue;
    if (!is_heavy(g.atom(bond.begin).element)
        || !is_heavy(g.atom(bond.end).element))
      continue;
    if (heavy_degree(g, bond.begin) >= 2 && heavy_degree(g, bond.end) >= 2)
      ++d.rotatable_bonds;
  }
  return d;
}

}  // namespace molforge
