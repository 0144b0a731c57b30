//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>

#include "molforge/diffusion.h"
#include "molforge/error.h"

namespace molforge {
namespace {
constexpr double kLogFloor = 1e-12;

void check_category(const TransitionModel &model, int c) {
  if (c < 0 || c >= model.categories())
    throw BadDistribution("category " + std::to_string(c) + " out of range");
}
}  // namespace

int sample_categorical(std::span<const double> probs, Rng &rng) {
  double total = 0;
  for (double p: probs)
    total += p;
  if (probs.empty() || !(total > 0.0))
    throw BadDistribution("cannot sample from an empty distribution");

  const double u = rng.uniform() * total;
  double acc = 0;
  int last_positive = -1;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0)
      continue;
    acc += probs[k];
    last_positive = static_cast<int>(k);
    if (u < acc)
      return last_positive;
  }
  // Rounding can leave u just above the accumulated total.
  return last_positive;
}

std::vector<double> forward_marginal(const TransitionModel &model, int x0,
                                     int t) {
  check_category(model, x0);
  const auto row = model.cumulative(t).row(x0);
  return { row.begin(), row.end() };
}

std::vector<double> posterior(const TransitionModel &model, int xt, int x0,
                              int t) {
  check_category(model, xt);
  check_category(model, x0);
  const Matrix &q = model.step(t);
  const Matrix &prev = model.cumulative(t - 1);
  const int f = model.categories();

  std::vector<double> out(f);
  double total = 0;
  for (int k = 0; k < f; ++k) {
    out[k] = q(k, xt) * prev(x0, k);
    total += out[k];
  }
  if (!(total > 0.0))
    throw ZeroMass("posterior has no mass for x^t=" + std::to_string(xt)
                   + ", x^0=" + std::to_string(x0) + " at t="
                   + std::to_string(t));
  for (double &v: out)
    v /= total;
  return out;
}

std::vector<double> posterior(const TransitionModel &model, int xt,
                              std::span<const double> x0, int t) {
  const int f = model.categories();
  if (static_cast<int>(x0.size()) != f)
    throw DimensionMismatch("x^0 row has the wrong width");
  std::vector<double> out(f, 0.0);
  double weight = 0;
  for (int c = 0; c < f; ++c) {
    if (x0[c] <= 0.0)
      continue;
    const std::vector<double> post = posterior(model, xt, c, t);
    for (int k = 0; k < f; ++k)
      out[k] += x0[c] * post[k];
    weight += x0[c];
  }
  if (!(weight > 0.0))
    throw ZeroMass("x^0 distribution has no mass");
  for (double &v: out)
    v /= weight;
  return out;
}

std::vector<double> guided(std::span<const double> p_cond,
                           std::span<const double> p_uncond, double w) {
  if (p_cond.size() != p_uncond.size())
    throw DimensionMismatch("guidance rows differ in width");
  if (w == 0.0)
    return { p_cond.begin(), p_cond.end() };

  std::vector<double> logits(p_cond.size());
  double peak = -INFINITY;
  for (std::size_t k = 0; k < p_cond.size(); ++k) {
    logits[k] = (1.0 + w) * std::log(std::max(p_cond[k], kLogFloor))
                - w * std::log(std::max(p_uncond[k], kLogFloor));
    peak = std::max(peak, logits[k]);
  }
  double total = 0;
  for (double &v: logits) {
    v = std::exp(v - peak);
    total += v;
  }
  for (double &v: logits)
    v /= total;
  return logits;
}

}  // namespace molforge
