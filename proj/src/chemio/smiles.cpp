//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "line_scanner.h"
#include "molforge/chemio.h"
#include "molforge/error.h"

namespace molforge {
namespace {
struct ParsedAtom {
  Atom atom;
  // Organic-subset atoms get implicit hydrogens after bonding is known.
  bool organic = false;
};

bool is_upper(char c) {
  return std::isupper(static_cast<unsigned char>(c)) != 0;
}
bool is_lower(char c) {
  return std::islower(static_cast<unsigned char>(c)) != 0;
}
bool is_digit(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) != 0;
}

bool aromatic_capable(Element e) {
  return e == Element::C || e == Element::N || e == Element::O
         || e == Element::S || e == Element::P;
}

class SmilesDialect {
public:
  bool is_bond(char c) const {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '/'
           || c == '\\' || c == '$';
  }

  BondOrder parse_bond(char c, std::size_t pos) const {
    switch (c) {
    case '-':
      return BondOrder::kSingle;
    case '=':
      return BondOrder::kDouble;
    case '#':
      return BondOrder::kTriple;
    case ':':
      return BondOrder::kAromatic;
    case '$':
      throw UnsupportedFeature(pos, "quadruple bonds");
    default:
      throw UnsupportedFeature(pos, "directional (E/Z) bonds");
    }
  }

  std::optional<ParsedAtom> parse_atom(std::string_view text,
                                       std::size_t &pos) const {
    const char c = text[pos];
    if (c == '[')
      return parse_bracket(text, pos);
    if (c == '*') {
      ++pos;
      return ParsedAtom { { Element::Star, 0, false, 0 }, true };
    }
    if (is_upper(c)) {
      if (pos + 1 < text.size()) {
        const std::string_view two = text.substr(pos, 2);
        if (two == "Cl" || two == "Br") {
          pos += 2;
          return ParsedAtom {
            { *element_from_symbol(two), 0, false, 0 }, true
          };
        }
      }
      switch (c) {
      case 'C':
      case 'N':
      case 'O':
      case 'S':
      case 'P':
      case 'F':
      case 'I': {
        ++pos;
        return ParsedAtom {
          { *element_from_symbol(std::string_view(&c, 1)), 0, false, 0 }, true
        };
      }
      case 'B':
        throw UnsupportedFeature(pos, "element B is not supported");
      default:
        return std::nullopt;
      }
    }
    switch (c) {
    case 'c':
    case 'n':
    case 'o':
    case 's':
    case 'p': {
      const char up = static_cast<char>(std::toupper(c));
      ++pos;
      return ParsedAtom {
        { *element_from_symbol(std::string_view(&up, 1)), 0, true, 0 }, true
      };
    }
    case 'b':
      throw UnsupportedFeature(pos, "element b is not supported");
    case '@':
      throw UnsupportedFeature(pos, "chirality");
    default:
      return std::nullopt;
    }
  }

private:
  ParsedAtom parse_bracket(std::string_view text, std::size_t &pos) const {
    const std::size_t open = pos;
    ++pos;
    auto at_end = [&] { return pos >= text.size(); };
    if (at_end())
      throw SyntaxError(pos, "unclosed bracket atom");
    if (is_digit(text[pos]))
      throw UnsupportedFeature(pos, "isotopes");

    ParsedAtom out;
    if (text[pos] == '*') {
      out.atom.element = Element::Star;
      ++pos;
    } else if (is_upper(text[pos])) {
      std::string sym(1, text[pos]);
      if (pos + 1 < text.size() && is_lower(text[pos + 1])) {
        const std::string two = sym + text[pos + 1];
        if (two == "Cl" || two == "Br") {
          sym = two;
        } else {
          throw UnsupportedFeature(pos, "element " + two + " is not supported");
        }
      }
      const auto el = element_from_symbol(sym);
      if (!el) {
        if (sym == "B" || sym == "K" || sym == "U" || sym == "V" || sym == "W"
            || sym == "Y")
          throw UnsupportedFeature(pos, "element " + sym + " is not supported");
        throw SyntaxError(pos, "unknown element '" + sym + "'");
      }
      out.atom.element = *el;
      pos += sym.size();
    } else if (is_lower(text[pos])) {
      const char up = static_cast<char>(std::toupper(text[pos]));
      const auto el = element_from_symbol(std::string_view(&up, 1));
      if (!el || !aromatic_capable(*el)) {
        if (text[pos] == 'b' || text.substr(pos, 2) == "se"
            || text.substr(pos, 2) == "as" || text.substr(pos, 2) == "te")
          throw UnsupportedFeature(pos, "aromatic element not supported");
        throw SyntaxError(pos, "unknown aromatic element");
      }
      out.atom.element = *el;
      out.atom.aromatic = true;
      ++pos;
    } else {
      throw SyntaxError(pos, "expected an element symbol");
    }

    if (!at_end() && text[pos] == '@')
      throw UnsupportedFeature(pos, "chirality");

    if (!at_end() && text[pos] == 'H') {
      ++pos;
      int h = 1;
      if (!at_end() && is_digit(text[pos])) {
        h = text[pos] - '0';
        ++pos;
      }
      out.atom.hydrogens = h;
    }

    if (!at_end() && (text[pos] == '+' || text[pos] == '-')) {
      const char sign = text[pos];
      const int unit = sign == '+' ? 1 : -1;
      ++pos;
      int charge = unit;
      if (!at_end() && is_digit(text[pos])) {
        charge = unit * (text[pos] - '0');
        ++pos;
        if (!at_end() && is_digit(text[pos]))
          throw SyntaxError(pos, "charge magnitude out of range");
      } else {
        while (!at_end() && text[pos] == sign) {
          charge += unit;
          ++pos;
          if (std::abs(charge) > 9)
            throw SyntaxError(pos, "charge magnitude out of range");
        }
      }
      out.atom.charge = charge;
    }

    if (!at_end() && text[pos] == ':')
      throw UnsupportedFeature(pos, "atom classes");
    if (at_end() || text[pos] != ']')
      throw SyntaxError(pos, "expected ']'");
    ++pos;

    if (out.atom.element == Element::Star && out.atom.charge != 0)
      throw UnsupportedFeature(open, "charged attachment point");
    return out;
  }
};
}  // namespace

MolecularGraph parse_smiles(std::string_view text) {
  SmilesDialect dialect;
  auto scanned =
      internal::scan_line<ParsedAtom, BondOrder>(text, dialect);

  const int n = static_cast<int>(scanned.atoms.size());
  std::vector<Atom> atoms;
  atoms.reserve(n);
  for (const ParsedAtom &pa: scanned.atoms)
    atoms.push_back(pa.atom);

  std::vector<Bond> bonds;
  std::vector<bool> implicit_aromatic;
  for (const auto &e: scanned.edges) {
    const bool both_aromatic = atoms[e.begin].aromatic && atoms[e.end].aromatic;
    BondOrder order;
    if (e.bond) {
      order = *e.bond;
      if (order == BondOrder::kAromatic && !both_aromatic)
        throw SyntaxError(e.position,
                          "aromatic bond between non-aromatic atoms");
    } else {
      order = both_aromatic ? BondOrder::kAromatic : BondOrder::kSingle;
    }
    bonds.push_back({ e.begin, e.end, order });
    implicit_aromatic.push_back(!e.bond && order == BondOrder::kAromatic);
  }

  // Implicit bonds between aromatic atoms that are not part of any ring
  // (biphenyl's linker) are single bonds.
  if (std::find(implicit_aromatic.begin(), implicit_aromatic.end(), true)
      != implicit_aromatic.end()) {
    const RingInfo rings = perceive_rings(MolecularGraph(atoms, bonds));
    for (std::size_t b = 0; b < bonds.size(); ++b) {
      if (implicit_aromatic[b] && !rings.bond_in_ring[b])
        bonds[b].order = BondOrder::kSingle;
    }
  }

  std::vector<std::vector<BondOrder>> incident(n);
  for (const Bond &b: bonds) {
    incident[b.begin].push_back(b.order);
    incident[b.end].push_back(b.order);
  }
  for (int i = 0; i < n; ++i) {
    if (scanned.atoms[i].organic)
      atoms[i].hydrogens = implicit_hydrogens(atoms[i], incident[i]);
  }
  return MolecularGraph(std::move(atoms), std::move(bonds));
}

// ---------------------------------------------------------------------------
// Writer

namespace {
std::string atom_text(const MolecularGraph &g, int i) {
  const Atom &a = g.atom(i);
  const std::vector<BondOrder> incident = g.incident_orders(i);

  const bool organic_element = a.element != Element::H;
  const bool organic_case = !a.aromatic || aromatic_capable(a.element);
  if (organic_element && organic_case && a.charge == 0
      && a.hydrogens == implicit_hydrogens(a, incident)) {
    std::string s(element_symbol(a.element));
    if (a.aromatic)
      s[0] = static_cast<char>(std::tolower(s[0]));
    return s;
  }

  std::string s = "[";
  std::string sym(element_symbol(a.element));
  if (a.aromatic && aromatic_capable(a.element))
    sym[0] = static_cast<char>(std::tolower(sym[0]));
  s += sym;
  if (a.hydrogens == 1)
    s += 'H';
  else if (a.hydrogens > 1)
    s += 'H' + std::to_string(a.hydrogens);
  if (a.charge > 0)
    s += a.charge == 1 ? "+" : "+" + std::to_string(a.charge);
  else if (a.charge < 0)
    s += a.charge == -1 ? "-" : "-" + std::to_string(-a.charge);
  s += ']';
  return s;
}

std::string bond_text(const MolecularGraph &g, const RingInfo &rings, int b) {
  const Bond &bond = g.bond(b);
  const bool both_aromatic =
      g.atom(bond.begin).aromatic && g.atom(bond.end).aromatic;
  switch (bond.order) {
  case BondOrder::kSingle:
    return both_aromatic ? "-" : "";
  case BondOrder::kDouble:
    return "=";
  case BondOrder::kTriple:
    return "#";
  case BondOrder::kAromatic:
    return rings.bond_in_ring[b] ? "" : ":";
  }
  return "";
}

std::string ring_label(int digit) {
  if (digit < 10)
    return std::to_string(digit);
  return "%" + std::to_string(digit);
}
}  // namespace

std::string write_smiles(const MolecularGraph &g) {
  const std::vector<int> rank = canonical_labeling(g).rank;
  const RingInfo rings = perceive_rings(g);
  const int n = g.atom_count();

  auto sorted_neighbors = [&](int u) {
    std::vector<Neighbor> nbs(g.neighbors(u).begin(), g.neighbors(u).end());
    std::sort(nbs.begin(), nbs.end(), [&](const Neighbor &a, const Neighbor &b) {
      return rank[a.atom] < rank[b.atom];
    });
    return nbs;
  };

  // Pass 1: DFS classification into tree edges and ring closures.
  std::vector<bool> visited(n, false), tree_bond(g.bond_count(), false);
  std::vector<std::vector<int>> children(n);
  std::vector<int> visit_order(n, -1);
  // ring_bonds_at[u]: closure bonds touching u, in the order they are met.
  std::vector<std::vector<int>> closures(n);
  std::vector<bool> closure_seen(g.bond_count(), false);
  int counter = 0;

  std::function<void(int)> classify = [&](int u) {
    visited[u] = true;
    visit_order[u] = counter++;
    for (const Neighbor &nb: sorted_neighbors(u)) {
      if (tree_bond[nb.bond] || closure_seen[nb.bond])
        continue;
      if (visited[nb.atom]) {
        closure_seen[nb.bond] = true;
        closures[nb.atom].push_back(nb.bond);
        closures[u].push_back(nb.bond);
      } else {
        tree_bond[nb.bond] = true;
        children[u].push_back(nb.atom);
        classify(nb.atom);
      }
    }
  };

  std::vector<int> roots;
  {
    // Start each component at its lowest-ranked atom of minimum degree, so
    // chains are written from an end rather than from the middle.
    std::vector<int> starts(n);
    for (int i = 0; i < n; ++i)
      starts[i] = i;
    std::sort(starts.begin(), starts.end(), [&](int a, int b) {
      const auto da = g.neighbors(a).size(), db = g.neighbors(b).size();
      return da != db ? da < db : rank[a] < rank[b];
    });
    for (int i: starts) {
      if (!visited[i]) {
        roots.push_back(i);
        classify(i);
      }
    }
  }

  // Pass 2: emission with lowest-free ring digits.
  std::string out;
  std::map<int, int> open_digit;  // bond -> digit
  std::vector<bool> digit_used(100, false);

  std::function<void(int)> emit = [&](int u) {
    out += atom_text(g, u);
    for (int b: closures[u]) {
      auto it = open_digit.find(b);
      if (it != open_digit.end()) {
        out += ring_label(it->second);
        digit_used[it->second] = false;
        open_digit.erase(it);
      } else {
        int d = 1;
        while (digit_used[d])
          ++d;
        digit_used[d] = true;
        open_digit[b] = d;
        out += bond_text(g, rings, b) + ring_label(d);
      }
    }
    for (std::size_t k = 0; k < children[u].size(); ++k) {
      const int v = children[u][k];
      const int b = *g.bond_between(u, v);
      const bool last = k + 1 == children[u].size();
      if (!last)
        out += '(';
      out += bond_text(g, rings, b);
      emit(v);
      if (!last)
        out += ')';
    }
  };

  for (std::size_t r = 0; r < roots.size(); ++r) {
    if (r > 0)
      out += '.';
    emit(roots[r]);
  }
  return out;
}

std::vector<SmilesLine> read_smiles_lines(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open " + path.string());
  std::vector<SmilesLine> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    // '#' is also the triple-bond symbol; only a leading '#' or one preceded
    // by whitespace starts a comment.
    std::size_t cut = std::string::npos;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '#'
          && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
        cut = i;
        break;
      }
    }
    if (cut != std::string::npos)
      line.resize(cut);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos)
      continue;
    const auto last = line.find_first_of(" \t\r", first);
    out.push_back({ number, line.substr(first, last == std::string::npos
                                                   ? std::string::npos
                                                   : last - first) });
  }
  return out;
}

}  // namespace molforge
