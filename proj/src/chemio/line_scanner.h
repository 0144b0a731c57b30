//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_SRC_CHEMIO_LINE_SCANNER_H_
#define MOLFORGE_SRC_CHEMIO_LINE_SCANNER_H_

#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "molforge/error.h"

namespace molforge::internal {

// Shared skeleton of SMILES and SMARTS: atoms, bonds, branches, ring
// closures and '.' separators. A Dialect supplies atom and bond parsing:
//
//   std::optional<Atom> parse_atom(std::string_view text, std::size_t &pos);
//   bool is_bond(char c) const;
//   Bond parse_bond(char c, std::size_t pos) const;
template <class Atom, class Bond>
struct ScannedGraph {
  struct Edge {
    int begin;
    int end;
    // nullopt when the notation left the bond implicit.
    std::optional<Bond> bond;
    std::size_t position;
  };

  std::vector<Atom> atoms;
  std::vector<std::size_t> atom_positions;
  std::vector<Edge> edges;
};

template <class Atom, class Bond, class Dialect>
ScannedGraph<Atom, Bond> scan_line(std::string_view text, Dialect &dialect) {
  ScannedGraph<Atom, Bond> out;
  if (text.empty())
    throw SyntaxError(0, "empty input");

  struct RingOpen {
    int atom;
    std::optional<Bond> bond;
    std::size_t position;
  };
  std::map<int, RingOpen> rings;
  std::vector<int> branches;
  int prev = -1;
  std::optional<Bond> pending;
  std::size_t pending_pos = 0;
  bool just_opened_branch = false;

  auto connected = [&](int a, int b) {
    for (const auto &e: out.edges) {
      if ((e.begin == a && e.end == b) || (e.begin == b && e.end == a))
        return true;
    }
    return false;
  };

  auto close_or_open_ring = [&](int number, std::size_t pos) {
    if (prev < 0)
      throw SyntaxError(pos, "ring closure without a preceding atom");
    auto it = rings.find(number);
    if (it == rings.end()) {
      rings.emplace(number, RingOpen { prev, pending, pos });
    } else {
      const RingOpen open = it->second;
      rings.erase(it);
      if (open.atom == prev)
        throw SyntaxError(pos, "ring closure bonds an atom to itself");
      if (connected(open.atom, prev))
        throw SyntaxError(pos, "ring closure duplicates an existing bond");
      std::optional<Bond> bond = open.bond;
      if (pending) {
        if (bond && !(*bond == *pending))
          throw SyntaxError(pos, "conflicting ring closure bond orders");
        bond = pending;
      }
      out.edges.push_back({ open.atom, prev, bond, pos });
    }
    pending.reset();
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    const bool opened_before = just_opened_branch;
    just_opened_branch = false;

    if (c == '(') {
      if (prev < 0)
        throw SyntaxError(pos, "branch without a preceding atom");
      if (pending)
        throw SyntaxError(pos, "bond symbol before a branch");
      branches.push_back(prev);
      just_opened_branch = true;
      ++pos;
    } else if (c == ')') {
      if (branches.empty())
        throw SyntaxError(pos, "unbalanced ')'");
      if (opened_before)
        throw SyntaxError(pos, "empty branch");
      if (pending)
        throw SyntaxError(pos, "bond symbol without a following atom");
      prev = branches.back();
      branches.pop_back();
      ++pos;
    } else if (c == '.') {
      if (prev < 0)
        throw SyntaxError(pos, "'.' without a preceding atom");
      if (pending)
        throw SyntaxError(pos, "bond symbol before '.'");
      if (!branches.empty())
        throw SyntaxError(pos, "'.' inside a branch");
      prev = -1;
      ++pos;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      close_or_open_ring(c - '0', pos);
      ++pos;
    } else if (c == '%') {
      if (pos + 2 >= text.size()
          || !std::isdigit(static_cast<unsigned char>(text[pos + 1]))
          || !std::isdigit(static_cast<unsigned char>(text[pos + 2])))
        throw SyntaxError(pos, "'%' must be followed by two digits");
      close_or_open_ring((text[pos + 1] - '0') * 10 + (text[pos + 2] - '0'),
                         pos);
      pos += 3;
    } else if (dialect.is_bond(c)) {
      if (pending)
        throw SyntaxError(pos, "consecutive bond symbols");
      if (prev < 0)
        throw SyntaxError(pos, "bond symbol without a preceding atom");
      pending = dialect.parse_bond(c, pos);
      pending_pos = pos;
      ++pos;
    } else {
      const std::size_t start = pos;
      std::optional<Atom> atom = dialect.parse_atom(text, pos);
      if (!atom)
        throw SyntaxError(start, std::string("unexpected character '") + c
                                     + "'");
      const int idx = static_cast<int>(out.atoms.size());
      out.atoms.push_back(std::move(*atom));
      out.atom_positions.push_back(start);
      if (prev >= 0)
        out.edges.push_back({ prev, idx, pending, pending ? pending_pos : start });
      pending.reset();
      prev = idx;
    }
  }

  if (pending)
    throw SyntaxError(text.size(), "bond symbol at end of input");
  if (!branches.empty())
    throw SyntaxError(text.size(), "unclosed branch");
  if (!rings.empty())
    throw SyntaxError(rings.begin()->second.position, "unclosed ring");
  if (prev < 0)
    throw SyntaxError(text.size(), "input ends without an atom");
  return out;
}

}  // namespace molforge::internal

#endif  // MOLFORGE_SRC_CHEMIO_LINE_SCANNER_H_
