//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_TESTS_SUPPORT_DIFFUSION_ORACLE_H_
#define MOLFORGE_TESTS_SUPPORT_DIFFUSION_ORACLE_H_

#include <random>
#include <vector>

#include "molforge/diffusion.h"

namespace molforge::test {

// Random row-stochastic matrix with strictly positive entries.
Matrix random_stochastic(std::mt19937_64 &rng, int f);

// q(x^{t-1} = k | x^t, x^0) by Bayes' rule over explicitly enumerated
// chains x^0 -> x^1 -> ... -> x^t, using only the per-step matrices.
// Returns an empty vector when q(x^t | x^0) = 0.
std::vector<double> enumerated_posterior(const std::vector<Matrix> &steps,
                                         int xt, int x0, int t);

}  // namespace molforge::test

#endif  // MOLFORGE_TESTS_SUPPORT_DIFFUSION_ORACLE_H_
