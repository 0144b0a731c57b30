//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <string>

#include "molforge/molgraph.h"

namespace molforge {
namespace {
// Main-group column (13..18) and whether the element is second-period.
struct GroupInfo {
  int group;
  bool period2;
};

GroupInfo group_of(Element e) {
  switch (e) {
  case Element::C:
    return { 14, true };
  case Element::N:
    return { 15, true };
  case Element::O:
    return { 16, true };
  case Element::F:
    return { 17, true };
  case Element::P:
    return { 15, false };
  case Element::S:
    return { 16, false };
  case Element::Cl:
  case Element::Br:
  case Element::I:
    return { 17, false };
  default:
    return { 0, true };
  }
}

struct BondTally {
  int aromatic = 0;
  int other = 0;
  bool exocyclic_multiple = false;
};

BondTally tally(std::span<const BondOrder> incident) {
  BondTally t;
  for (BondOrder o: incident) {
    if (o == BondOrder::kAromatic) {
      ++t.aromatic;
    } else {
      t.other += static_cast<int>(o);
      if (o != BondOrder::kSingle)
        t.exocyclic_multiple = true;
    }
  }
  return t;
}

// Whether the atom may (or for neutral carbon must) take the extra ring
// electron of a Kekule double bond.
enum class RingElectron { kNone, kOptional, kRequired };

RingElectron ring_electron(const Atom &atom, const BondTally &t) {
  if (!atom.aromatic || t.aromatic == 0 || t.exocyclic_multiple)
    return RingElectron::kNone;
  switch (atom.element) {
  case Element::C:
    return atom.charge == 0 ? RingElectron::kRequired
                            : RingElectron::kOptional;
  case Element::N:
  case Element::P:
    return RingElectron::kOptional;
  default:
    return RingElectron::kNone;
  }
}
}  // namespace

std::vector<int> allowed_valences(Element e, int charge) {
  if (e == Element::Star)
    return { 1 };
  if (e == Element::H)
    return { charge == 0 ? 1 : 0 };

  const GroupInfo info = group_of(e);
  const int group = info.group - charge;
  switch (group) {
  case 13:
    return { 3 };
  case 14:
    return { 4 };
  case 15:
    return info.period2 ? std::vector<int> { 3 } : std::vector<int> { 3, 5 };
  case 16:
    return info.period2 ? std::vector<int> { 2 }
                        : std::vector<int> { 2, 4, 6 };
  case 17:
    return { 1 };
  default:
    return { 0 };
  }
}

int bonded_valence(const Atom &atom, std::span<const BondOrder> incident) {
  const BondTally t = tally(incident);
  int used = t.aromatic + t.other;
  if (ring_electron(atom, t) == RingElectron::kRequired)
    ++used;
  return used;
}

int implicit_hydrogens(const Atom &atom, std::span<const BondOrder> incident) {
  if (atom.element == Element::Star || atom.element == Element::H)
    return 0;

  const BondTally t = tally(incident);
  const std::vector<int> allowed = allowed_valences(atom.element, atom.charge);
  const int max_allowed = allowed.back();

  int used = t.aromatic + t.other;
  switch (ring_electron(atom, t)) {
  case RingElectron::kRequired:
    ++used;
    break;
  case RingElectron::kOptional:
    if (used + 1 <= max_allowed)
      ++used;
    break;
  case RingElectron::kNone:
    break;
  }

  for (int v: allowed) {
    if (v >= used)
      return v - used;
  }
  return 0;
}

ValenceReport check_valence(const MolecularGraph &g) {
  ValenceReport report;
  for (int i = 0; i < g.atom_count(); ++i) {
    const Atom &a = g.atom(i);
    const std::vector<BondOrder> incident = g.incident_orders(i);
    const int used = bonded_valence(a, incident) + a.hydrogens;
    const int max_allowed = allowed_valences(a.element, a.charge).back();

    if (a.element == Element::Star && (g.degree(i) != 1 || a.hydrogens != 0)) {
      report.violations.push_back(
          { i, used, max_allowed, "attachment point needs exactly one bond" });
    } else if (used > max_allowed) {
      report.violations.push_back({ i, used, max_allowed,
                                    std::string(element_symbol(a.element))
                                        + " exceeds its valence" });
    }
  }
  report.valid = report.violations.empty();
  return report;
}

}  // namespace molforge
