//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <utility>
#include <vector>

#include "molforge/error.h"
#include "molforge/molgraph.h"

namespace molforge {
namespace {
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t &h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffU;
    h *= kFnvPrime;
  }
}
}  // namespace

std::uint64_t hash_tuple(std::span<const std::int64_t> values) {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, values.size());
  for (std::int64_t v: values)
    fnv_mix(h, static_cast<std::uint64_t>(v));
  return h;
}

Fingerprint::Fingerprint(int n_bits, int radius)
    : n_bits_(n_bits), radius_(radius),
      words_(static_cast<std::size_t>((n_bits + 63) / 64), 0) {
  if (n_bits <= 0)
    throw std::invalid_argument("fingerprint length must be positive");
}

int Fingerprint::count() const {
  int c = 0;
  for (std::uint64_t w: words_)
    c += std::popcount(w);
  return c;
}

bool Fingerprint::test(int bit) const {
  return ((words_[bit / 64] >> (bit % 64)) & 1U) != 0;
}

void Fingerprint::set(int bit) {
  words_[bit / 64] |= std::uint64_t { 1 } << (bit % 64);
}

std::vector<int> Fingerprint::on_bits() const {
  std::vector<int> bits;
  for (int i = 0; i < n_bits_; ++i) {
    if (test(i))
      bits.push_back(i);
  }
  return bits;
}

std::vector<std::uint64_t> morgan_environments(const MolecularGraph &g,
                                               int radius) {
  if (radius < 0)
    throw std::invalid_argument("fingerprint radius must be non-negative");
  if (!check_valence(g).valid)
    throw InvalidGraph("fingerprint requires a valence-valid graph");

  const RingInfo rings = perceive_rings(g);
  const int n = g.atom_count();
  std::vector<std::uint64_t> ids(n, 0);
  std::vector<std::uint64_t> out;

  auto skip = [&](int i) { return g.atom(i).element == Element::Star; };

  for (int i = 0; i < n; ++i) {
    if (skip(i))
      continue;
    const Atom &a = g.atom(i);
    int degree = 0;
    for (const Neighbor &nb: g.neighbors(i)) {
      if (!skip(nb.atom))
        ++degree;
    }
    const std::int64_t inv[] = { static_cast<std::int64_t>(a.element),
                                 degree,
                                 a.charge,
                                 a.hydrogens,
                                 rings.atom_in_ring[i] ? 1 : 0,
                                 a.aromatic ? 1 : 0 };
    ids[i] = hash_tuple(inv);
    out.push_back(ids[i]);
  }

  std::vector<std::int64_t> buf;
  std::vector<std::pair<std::int64_t, std::int64_t>> nbrs;
  for (int round = 1; round <= radius; ++round) {
    std::vector<std::uint64_t> next(n, 0);
    for (int i = 0; i < n; ++i) {
      if (skip(i))
        continue;
      nbrs.clear();
      for (const Neighbor &nb: g.neighbors(i)) {
        if (skip(nb.atom))
          continue;
        nbrs.emplace_back(static_cast<std::int64_t>(g.bond(nb.bond).order),
                          static_cast<std::int64_t>(ids[nb.atom]));
      }
      std::sort(nbrs.begin(), nbrs.end());
      buf.clear();
      buf.push_back(round);
      buf.push_back(static_cast<std::int64_t>(ids[i]));
      for (const auto &[order, id]: nbrs) {
        buf.push_back(order);
        buf.push_back(id);
      }
      next[i] = hash_tuple(buf);
      out.push_back(next[i]);
    }
    ids = std::move(next);
  }
  return out;
}

Fingerprint morgan_fingerprint(const MolecularGraph &g, int radius,
                               int n_bits) {
  if (n_bits <= 0 || !std::has_single_bit(static_cast<unsigned>(n_bits)))
    throw std::invalid_argument("fingerprint length must be a power of two");

  Fingerprint fp(n_bits, radius);
  for (std::uint64_t id: morgan_environments(g, radius))
    fp.set(static_cast<int>(id % static_cast<std::uint64_t>(n_bits)));
  return fp;
}

double tanimoto(const Fingerprint &a, const Fingerprint &b) {
  if (a.size() != b.size() || a.radius() != b.radius())
    throw LengthMismatch("fingerprints differ in length or radius");

  int both = 0, either = 0;
  const auto wa = a.words(), wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    both += std::popcount(wa[i] & wb[i]);
    either += std::popcount(wa[i] | wb[i]);
  }
  if (either == 0)
    return 1.0;
  return static_cast<double>(both) / either;
}

}  // namespace molforge
