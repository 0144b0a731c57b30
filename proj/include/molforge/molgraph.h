//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_MOLGRAPH_H_
#define MOLFORGE_MOLGRAPH_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace molforge {

enum class Element : std::uint8_t { C, N, O, S, P, F, Cl, Br, I, H, Star };

inline constexpr int kElementCount = 11;

std::string_view element_symbol(Element e);
std::optional<Element> element_from_symbol(std::string_view symbol);
double atomic_mass(Element e);

// Heavy atoms exclude hydrogen and the '*' attachment point.
inline bool is_heavy(Element e) {
  return e != Element::H && e != Element::Star;
}

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

// Numeric order used by the graph JSON format (aromatic is 1.5).
double bond_order_value(BondOrder order);

struct Atom {
  Element element = Element::C;
  int charge = 0;
  bool aromatic = false;
  // Hydrogens carried by this atom (not present as separate graph nodes).
  int hydrogens = 0;

  friend bool operator==(const Atom &, const Atom &) = default;
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondOrder order = BondOrder::kSingle;

  int other(int atom) const { return atom == begin ? end : begin; }
};

struct Neighbor {
  int atom;
  int bond;
};

/// Immutable typed atom/bond graph. The constructor enforces the structural
/// invariants (indices in range, no self loops or parallel bonds, aromatic
/// bonds only between aromatic atoms, uncharged attachment points, at least
/// one atom) and throws InvalidGraph otherwise. Valence is *not* a structural
/// invariant; see check_valence().
class MolecularGraph {
public:
  MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds);

  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }

  const std::vector<Atom> &atoms() const { return atoms_; }
  const std::vector<Bond> &bonds() const { return bonds_; }
  const Atom &atom(int idx) const { return atoms_[idx]; }
  const Bond &bond(int idx) const { return bonds_[idx]; }

  std::span<const Neighbor> neighbors(int atom) const {
    return adjacency_[atom];
  }
  int degree(int atom) const {
    return static_cast<int>(adjacency_[atom].size());
  }

  std::optional<int> bond_between(int a, int b) const;

  // True when any '*' attachment point is present.
  bool is_polymer_context() const;

  // Atom i of this graph becomes atom perm[i] of the result.
  MolecularGraph permuted(std::span<const int> perm) const;

  // Connected-component label per atom, labels numbered by first atom.
  std::vector<int> component_labels(int *count = nullptr) const;
  std::vector<MolecularGraph> split_components() const;

  // Orders incident to an atom, in adjacency order.
  std::vector<BondOrder> incident_orders(int atom) const;

private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

// ---------------------------------------------------------------------------
// Valence rules

// Allowed valences for an element with a formal charge, lowest first.
// Charged atoms use the isoelectronic neighbor's entries (N+ behaves like C).
std::vector<int> allowed_valences(Element e, int charge);

// Bond valence an atom spends, aromatic bonds counting one each plus the
// shared ring electron of a neutral aromatic carbon (so a benzene carbon
// spends 3 on its ring bonds). Hydrogens are not included.
int bonded_valence(const Atom &atom, std::span<const BondOrder> incident);

// Hydrogen count that brings an organic-subset atom to the lowest allowed
// valence consistent with its bonds. Aromatic N/P take the ring electron when
// it fits, which leaves pyridine-type nitrogen without hydrogen.
int implicit_hydrogens(const Atom &atom, std::span<const BondOrder> incident);

struct ValenceViolation {
  int atom;
  int used;
  int allowed_max;
  std::string reason;
};

struct ValenceReport {
  bool valid = true;
  std::vector<ValenceViolation> violations;
};

ValenceReport check_valence(const MolecularGraph &g);

// ---------------------------------------------------------------------------
// Rings

struct RingInfo {
  // |E| - |V| + components.
  int cyclomatic_number = 0;
  std::vector<bool> atom_in_ring;
  std::vector<bool> bond_in_ring;
  // Minimum cycle basis, each ring as a closed walk of atom indices.
  std::vector<std::vector<int>> rings;
  std::vector<std::vector<int>> ring_bonds;
};

RingInfo perceive_rings(const MolecularGraph &g);

// ---------------------------------------------------------------------------
// Canonical ordering

struct CanonicalLabeling {
  // rank[i] is the canonical position of atom i; ranks are a permutation.
  std::vector<int> rank;
  std::string key;
};

CanonicalLabeling canonical_labeling(const MolecularGraph &g);
std::string canonical_key(const MolecularGraph &g);

// ---------------------------------------------------------------------------
// Fingerprints

inline constexpr int kDefaultFingerprintBits = 2048;
inline constexpr int kDefaultFingerprintRadius = 2;

class Fingerprint {
public:
  Fingerprint(int n_bits, int radius);

  int size() const { return n_bits_; }
  int radius() const { return radius_; }
  int count() const;
  bool test(int bit) const;
  void set(int bit);
  std::vector<int> on_bits() const;

  std::span<const std::uint64_t> words() const { return words_; }

  friend bool operator==(const Fingerprint &, const Fingerprint &) = default;

private:
  int n_bits_;
  int radius_;
  std::vector<std::uint64_t> words_;
};

// 64-bit FNV-1a over a length-prefixed tuple of integers.
std::uint64_t hash_tuple(std::span<const std::int64_t> values);

// Every environment identifier of every round 0..radius, one per
// (atom, round), '*' atoms excluded.
std::vector<std::uint64_t> morgan_environments(const MolecularGraph &g,
                                               int radius);

Fingerprint morgan_fingerprint(const MolecularGraph &g,
                               int radius = kDefaultFingerprintRadius,
                               int n_bits = kDefaultFingerprintBits);

double tanimoto(const Fingerprint &a, const Fingerprint &b);

// ---------------------------------------------------------------------------
// Descriptors

struct Descriptors {
  double molecular_weight = 0;
  int ring_count = 0;
  int aromatic_ring_count = 0;
  int rotatable_bonds = 0;
  int h_donors = 0;
  int h_acceptors = 0;
  int attachment_points = 0;
};

Descriptors descriptors(const MolecularGraph &g);

// ---------------------------------------------------------------------------
// Graph JSON: {"atoms":[{"el","charge","aromatic","h"}],"bonds":[[i,j,order]]}

nlohmann::json graph_to_json(const MolecularGraph &g);
MolecularGraph graph_from_json(const nlohmann::json &j);

}  // namespace molforge

#endif  // MOLFORGE_MOLGRAPH_H_
