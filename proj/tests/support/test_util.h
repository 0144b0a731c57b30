//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_TESTS_SUPPORT_TEST_UTIL_H_
#define MOLFORGE_TESTS_SUPPORT_TEST_UTIL_H_

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <random>
#include <vector>

#include "molforge/molgraph.h"

namespace molforge::test {

inline std::filesystem::path data_dir() {
  return MOLFORGE_DATA_DIR;
}

inline std::filesystem::path fixture_dir() {
  return MOLFORGE_FIXTURE_DIR;
}

inline std::vector<int> random_permutation(int n, std::mt19937_64 &rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

// Graph isomorphism by exhaustive search with element/degree pruning; only
// for the small graphs used in tests.
bool isomorphic(const MolecularGraph &a, const MolecularGraph &b);

std::filesystem::path temp_path(const std::string &name);

}  // namespace molforge::test

#endif  // MOLFORGE_TESTS_SUPPORT_TEST_UTIL_H_
