//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_CHEMIO_H_
#define MOLFORGE_CHEMIO_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "molforge/molgraph.h"

namespace molforge {

/// Parses the supported SMILES subset: organic-subset and bracket atoms (with
/// H count and charge), bonds - = # : and implicit aromatic bonds, ring
/// closures (digits and %nn), branches, '.' and '*'. Organic-subset atoms get
/// implicit hydrogens at the lowest consistent valence. Stereo, isotopes and
/// atom classes raise UnsupportedFeature; malformed input raises SyntaxError.
MolecularGraph parse_smiles(std::string_view text);

/// Canonical SMILES in the atom order of canonical_labeling(), so equal
/// graphs always produce identical text.
std::string write_smiles(const MolecularGraph &g);

// ---------------------------------------------------------------------------
// Patterns

enum class BondQuery : std::uint8_t {
  kSingle,
  kDouble,
  kTriple,
  kAromatic,
  kAny,
  // Unspecified SMARTS bond.
  kSingleOrAromatic,
};

struct AtomQuery {
  // nullopt matches any element.
  std::optional<Element> element;
  std::optional<bool> aromatic;
  std::optional<bool> in_ring;
  std::optional<int> degree;
  std::optional<int> charge;
  std::optional<int> hydrogens;
  // 0 when the atom carries no map label.
  int map = 0;
};

struct PatternBond {
  int begin = 0;
  int end = 0;
  BondQuery order = BondQuery::kSingleOrAromatic;
};

class PatternGraph {
public:
  PatternGraph() = default;
  PatternGraph(std::vector<AtomQuery> atoms, std::vector<PatternBond> bonds,
               std::string text = {});

  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }
  bool empty() const { return atoms_.empty(); }

  const std::vector<AtomQuery> &atoms() const { return atoms_; }
  const std::vector<PatternBond> &bonds() const { return bonds_; }
  const AtomQuery &atom(int i) const { return atoms_[i]; }
  const PatternBond &bond(int i) const { return bonds_[i]; }
  std::span<const Neighbor> neighbors(int atom) const {
    return adjacency_[atom];
  }
  std::optional<int> bond_between(int a, int b) const;

  // Pattern atom index carrying a map label, if any.
  std::optional<int> find_map(int map) const;

  const std::string &text() const { return text_; }

private:
  std::vector<AtomQuery> atoms_;
  std::vector<PatternBond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::string text_;
};

/// Parses the SMARTS subset used by retro templates. Bracket atoms accept
/// element symbols (case selects aromatic/aliphatic), '*', a, A, R, !R, R0,
/// D<n>, H<n>, #<n>, charges, and a trailing :<map>; primitives may be joined
/// by ';' or '&' or simply concatenated. Bonds: - = # : ~ and unspecified
/// (single or aromatic). Recursive SMARTS, ',' and most negations raise
/// UnsupportedFeature.
PatternGraph parse_pattern(std::string_view text);

bool bond_matches(BondQuery query, BondOrder order);

// ---------------------------------------------------------------------------
// Stock files: one SMILES per line, '#' starts a comment.

struct SmilesLine {
  int line_number;
  std::string smiles;
};

std::vector<SmilesLine> read_smiles_lines(const std::filesystem::path &path);

}  // namespace molforge

#endif  // MOLFORGE_CHEMIO_H_
