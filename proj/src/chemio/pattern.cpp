//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cctype>
#include <cstdlib>
#include <map>
#include <string>

#include "line_scanner.h"
#include "molforge/chemio.h"
#include "molforge/error.h"

namespace molforge {

PatternGraph::PatternGraph(std::vector<AtomQuery> atoms,
                           std::vector<PatternBond> bonds, std::string text)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)),
      adjacency_(atoms_.size()), text_(std::move(text)) {
  const int n = atom_count();
  for (int b = 0; b < bond_count(); ++b) {
    const PatternBond &bond = bonds_[b];
    if (bond.begin < 0 || bond.begin >= n || bond.end < 0 || bond.end >= n)
      throw InvalidGraph("pattern bond endpoint out of range");
    if (bond.begin == bond.end)
      throw InvalidGraph("pattern bond is a self loop");
    if (bond_between(bond.begin, bond.end))
      throw InvalidGraph("duplicate pattern bond");
    adjacency_[bond.begin].push_back({ bond.end, b });
    adjacency_[bond.end].push_back({ bond.begin, b });
  }
}

std::optional<int> PatternGraph::bond_between(int a, int b) const {
  for (const Neighbor &nb: adjacency_[a]) {
    if (nb.atom == b)
      return nb.bond;
  }
  return std::nullopt;
}

std::optional<int> PatternGraph::find_map(int map) const {
  if (map <= 0)
    return std::nullopt;
  for (int i = 0; i < atom_count(); ++i) {
    if (atoms_[i].map == map)
      return i;
  }
  return std::nullopt;
}

bool bond_matches(BondQuery query, BondOrder order) {
  switch (query) {
  case BondQuery::kSingle:
    return order == BondOrder::kSingle;
  case BondQuery::kDouble:
    return order == BondOrder::kDouble;
  case BondQuery::kTriple:
    return order == BondOrder::kTriple;
  case BondQuery::kAromatic:
    return order == BondOrder::kAromatic;
  case BondQuery::kAny:
    return true;
  case BondQuery::kSingleOrAromatic:
    return order == BondOrder::kSingle || order == BondOrder::kAromatic;
  }
  return false;
}

namespace {
bool is_digit(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) != 0;
}

std::optional<Element> element_by_number(int z) {
  switch (z) {
  case 1:
    return Element::H;
  case 6:
    return Element::C;
  case 7:
    return Element::N;
  case 8:
    return Element::O;
  case 9:
    return Element::F;
  case 15:
    return Element::P;
  case 16:
    return Element::S;
  case 17:
    return Element::Cl;
  case 35:
    return Element::Br;
  case 53:
    return Element::I;
  default:
    return std::nullopt;
  }
}

template <class T>
void assign(std::optional<T> &slot, T value, std::size_t pos,
            const char *what) {
  if (slot && *slot != value)
    throw SyntaxError(pos, std::string("conflicting ") + what + " primitives");
  slot = value;
}

class PatternDialect {
public:
  bool is_bond(char c) const {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '~'
           || c == '/' || c == '\\' || c == '@';
  }

  BondQuery parse_bond(char c, std::size_t pos) const {
    switch (c) {
    case '-':
      return BondQuery::kSingle;
    case '=':
      return BondQuery::kDouble;
    case '#':
      return BondQuery::kTriple;
    case ':':
      return BondQuery::kAromatic;
    case '~':
      return BondQuery::kAny;
    case '@':
      throw UnsupportedFeature(pos, "ring bond primitive");
    default:
      throw UnsupportedFeature(pos, "directional bonds");
    }
  }

  std::optional<AtomQuery> parse_atom(std::string_view text,
                                      std::size_t &pos) const {
    const char c = text[pos];
    if (c == '[')
      return parse_bracket(text, pos);
    if (c == '!' || c == '$' || c == ',' || c == '&' || c == ';')
      throw UnsupportedFeature(pos, "logical operators outside brackets");

    AtomQuery q;
    if (c == '*') {
      ++pos;
      return q;
    }
    if (c == 'a' || c == 'A') {
      q.aromatic = c == 'a';
      ++pos;
      return q;
    }
    const auto sym = organic_symbol(text, pos);
    if (!sym)
      return std::nullopt;
    q.element = sym->first;
    q.aromatic = sym->second;
    return q;
  }

private:
  // Organic-subset symbol at pos (Cl, Br, C, c, ...): element and aromatic
  // flag; advances pos on success.
  static std::optional<std::pair<Element, bool>>
  organic_symbol(std::string_view text, std::size_t &pos) {
    const std::string_view two = text.substr(pos, 2);
    if (two == "Cl" || two == "Br") {
      pos += 2;
      return std::pair { *element_from_symbol(two), false };
    }
    const char c = text[pos];
    switch (c) {
    case 'C':
    case 'N':
    case 'O':
    case 'S':
    case 'P':
    case 'F':
    case 'I':
      ++pos;
      return std::pair { *element_from_symbol(std::string_view(&c, 1)),
                         false };
    case 'c':
    case 'n':
    case 'o':
    case 's':
    case 'p': {
      const char up = static_cast<char>(std::toupper(c));
      ++pos;
      return std::pair { *element_from_symbol(std::string_view(&up, 1)),
                         true };
    }
    default:
      return std::nullopt;
    }
  }

  static int read_number(std::string_view text, std::size_t &pos,
                         int fallback) {
    if (pos >= text.size() || !is_digit(text[pos]))
      return fallback;
    int value = 0;
    int digits = 0;
    while (pos < text.size() && is_digit(text[pos])) {
      value = value * 10 + (text[pos] - '0');
      ++pos;
      if (++digits > 4)
        throw SyntaxError(pos, "number too long");
    }
    return value;
  }

  AtomQuery parse_bracket(std::string_view text, std::size_t &pos) const {
    ++pos;
    AtomQuery q;
    bool any_primitive = false;
    while (true) {
      if (pos >= text.size())
        throw SyntaxError(pos, "unclosed bracket atom");
      const char c = text[pos];
      const std::size_t at = pos;
      if (c == ']') {
        if (!any_primitive)
          throw SyntaxError(pos, "empty bracket atom");
        ++pos;
        return q;
      }
      if (c == ';' || c == '&') {
        ++pos;
        continue;
      }
      if (c == ':') {
        ++pos;
        if (pos >= text.size() || !is_digit(text[pos]))
          throw SyntaxError(pos, "map label needs digits");
        q.map = read_number(text, pos, 0);
        if (q.map == 0)
          throw SyntaxError(at, "map label must be positive");
        if (pos >= text.size() || text[pos] != ']')
          throw SyntaxError(pos, "map label must end the bracket atom");
        continue;
      }
      any_primitive = true;
      if (c == '*') {
        ++pos;
      } else if (c == 'a' || c == 'A') {
        assign(q.aromatic, c == 'a', at, "aromaticity");
        ++pos;
      } else if (c == 'R') {
        ++pos;
        const int n = read_number(text, pos, -1);
        if (n > 0)
          throw UnsupportedFeature(at, "ring membership counts");
        assign(q.in_ring, n != 0, at, "ring");
      } else if (c == '!') {
        if (pos + 1 < text.size() && text[pos + 1] == 'R'
            && (pos + 2 >= text.size() || !is_digit(text[pos + 2]))) {
          assign(q.in_ring, false, at, "ring");
          pos += 2;
        } else {
          throw UnsupportedFeature(at, "negation other than !R");
        }
      } else if (c == 'D') {
        ++pos;
        assign(q.degree, read_number(text, pos, 1), at, "degree");
      } else if (c == 'H') {
        ++pos;
        assign(q.hydrogens, read_number(text, pos, 1), at, "hydrogen");
      } else if (c == '#') {
        ++pos;
        if (pos >= text.size() || !is_digit(text[pos]))
          throw SyntaxError(pos, "atomic number needs digits");
        const auto el = element_by_number(read_number(text, pos, 0));
        if (!el)
          throw UnsupportedFeature(at, "element not supported");
        assign(q.element, *el, at, "element");
      } else if (c == '+' || c == '-') {
        const int unit = c == '+' ? 1 : -1;
        ++pos;
        int charge = unit;
        if (pos < text.size() && is_digit(text[pos])) {
          charge = unit * read_number(text, pos, 1);
        } else {
          while (pos < text.size() && text[pos] == c) {
            charge += unit;
            ++pos;
          }
        }
        if (std::abs(charge) > 9)
          throw SyntaxError(at, "charge magnitude out of range");
        assign(q.charge, charge, at, "charge");
      } else if (c == ',' || c == '$' || c == '@' || c == 'X' || c == 'x'
                 || c == 'v' || c == 'r') {
        throw UnsupportedFeature(at, std::string("SMARTS primitive '") + c
                                         + "'");
      } else {
        std::size_t p = pos;
        const auto sym = organic_symbol(text, p);
        if (!sym) {
          if (std::isupper(static_cast<unsigned char>(c)))
            throw UnsupportedFeature(at, "element not supported");
          throw SyntaxError(at, std::string("unexpected character '") + c
                                    + "' in bracket atom");
        }
        pos = p;
        assign(q.element, sym->first, at, "element");
        assign(q.aromatic, sym->second, at, "aromaticity");
      }
    }
  }
};
}  // namespace

PatternGraph parse_pattern(std::string_view text) {
  PatternDialect dialect;
  auto scanned = internal::scan_line<AtomQuery, BondQuery>(text, dialect);

  std::map<int, std::size_t> seen;
  for (std::size_t i = 0; i < scanned.atoms.size(); ++i) {
    const int map = scanned.atoms[i].map;
    if (map == 0)
      continue;
    if (!seen.emplace(map, i).second)
      throw SyntaxError(scanned.atom_positions[i],
                        "duplicate map label " + std::to_string(map));
  }

  std::vector<PatternBond> bonds;
  for (const auto &e: scanned.edges)
    bonds.push_back(
        { e.begin, e.end, e.bond.value_or(BondQuery::kSingleOrAromatic) });
  return PatternGraph(std::move(scanned.atoms), std::move(bonds),
                      std::string(text));
}

}  // namespace molforge
