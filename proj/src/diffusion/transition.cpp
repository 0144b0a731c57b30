//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <numbers>

#include "molforge/diffusion.h"
#include "molforge/error.h"

namespace molforge {
namespace {
constexpr double kMaxBeta = 0.999;
constexpr double kCosineOffset = 0.008;
constexpr double kStochasticTolerance = 1e-9;

void check_stochastic(const Matrix &m, const char *what) {
  for (int i = 0; i < m.n; ++i) {
    double sum = 0;
    for (double v: m.row(i)) {
      if (!(v >= 0.0))
        throw BadDistribution(std::string(what) + " has a negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kStochasticTolerance)
      throw BadDistribution(std::string(what) + " row "
                            + std::to_string(i) + " sums to "
                            + std::to_string(sum));
  }
}

void check_distribution(std::span<const double> p, int categories,
                        bool strictly_positive) {
  if (static_cast<int>(p.size()) != categories)
    throw BadDistribution("stationary distribution has the wrong length");
  double sum = 0;
  for (double v: p) {
    if (!(strictly_positive ? v > 0.0 : v >= 0.0))
      throw BadDistribution("stationary distribution must be positive");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance)
    throw BadDistribution("stationary distribution must sum to 1");
}
}  // namespace

NoiseSchedule::NoiseSchedule(ScheduleFamily family, std::vector<double> betas)
    : family_(family), betas_(std::move(betas)) {
  if (betas_.empty())
    throw std::invalid_argument("schedule needs at least one step");
  alpha_bar_.assign(betas_.size() + 1, 1.0);
  for (std::size_t t = 1; t <= betas_.size(); ++t) {
    const double b = betas_[t - 1];
    if (!(b >= 0.0 && b < 1.0))
      throw std::invalid_argument("betas must lie in [0, 1)");
    alpha_bar_[t] = alpha_bar_[t - 1] * (1.0 - b);
  }
}

NoiseSchedule NoiseSchedule::linear(int steps) {
  if (steps < 1)
    throw std::invalid_argument("schedule needs at least one step");
  const double scale = 1000.0 / steps;
  const double start = std::min(1e-4 * scale, kMaxBeta);
  const double end = std::min(0.02 * scale, kMaxBeta);
  std::vector<double> betas(steps);
  for (int t = 0; t < steps; ++t) {
    const double frac = steps == 1 ? 1.0 : static_cast<double>(t) / (steps - 1);
    betas[t] = std::min(start + (end - start) * frac, kMaxBeta);
  }
  return NoiseSchedule(ScheduleFamily::kLinear, std::move(betas));
}

NoiseSchedule NoiseSchedule::cosine(int steps) {
  if (steps < 1)
    throw std::invalid_argument("schedule needs at least one step");
  auto f = [&](int t) {
    const double x = (static_cast<double>(t) / steps + kCosineOffset)
                     / (1.0 + kCosineOffset) * std::numbers::pi / 2.0;
    return std::cos(x) * std::cos(x);
  };
  std::vector<double> betas(steps);
  for (int t = 1; t <= steps; ++t)
    betas[t - 1] = std::clamp(1.0 - f(t) / f(t - 1), 0.0, kMaxBeta);
  return NoiseSchedule(ScheduleFamily::kCosine, std::move(betas));
}

NoiseSchedule NoiseSchedule::custom(std::vector<double> betas) {
  return NoiseSchedule(ScheduleFamily::kCustom, std::move(betas));
}

std::string to_string(ScheduleFamily family) {
  switch (family) {
  case ScheduleFamily::kLinear:
    return "linear";
  case ScheduleFamily::kCosine:
    return "cosine";
  case ScheduleFamily::kCustom:
    return "custom";
  }
  return "?";
}

ScheduleFamily schedule_family_from_string(std::string_view name) {
  if (name == "linear")
    return ScheduleFamily::kLinear;
  if (name == "cosine")
    return ScheduleFamily::kCosine;
  throw std::invalid_argument("unknown schedule '" + std::string(name) + "'");
}

std::string to_string(TransitionFamily family) {
  return family == TransitionFamily::kUniform ? "uniform" : "marginal";
}

TransitionFamily transition_family_from_string(std::string_view name) {
  if (name == "uniform")
    return TransitionFamily::kUniform;
  if (name == "marginal")
    return TransitionFamily::kMarginal;
  throw std::invalid_argument("unknown transition family '"
                              + std::string(name) + "'");
}

Matrix Matrix::identity(int size) {
  Matrix m(size);
  for (int i = 0; i < size; ++i)
    m(i, i) = 1.0;
  return m;
}

Matrix operator*(const Matrix &a, const Matrix &b) {
  if (a.n != b.n)
    throw DimensionMismatch("matrix sizes differ");
  Matrix c(a.n);
  for (int i = 0; i < a.n; ++i) {
    for (int k = 0; k < a.n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0)
        continue;
      for (int j = 0; j < a.n; ++j)
        c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

TransitionModel::TransitionModel(const NoiseSchedule &schedule,
                                 TransitionFamily family, int categories,
                                 std::optional<std::vector<double>> stationary)
    : categories_(categories) {
  if (categories < 2)
    throw std::invalid_argument("need at least two categories");
  if (family == TransitionFamily::kUniform) {
    stationary_.assign(categories, 1.0 / categories);
  } else {
    if (!stationary)
      throw BadDistribution("marginal family needs a stationary distribution");
    check_distribution(*stationary, categories, true);
    stationary_ = *stationary;
  }

  for (int t = 1; t <= schedule.steps(); ++t) {
    const double beta = schedule.beta(t);
    Matrix q(categories);
    for (int i = 0; i < categories; ++i) {
      for (int j = 0; j < categories; ++j)
        q(i, j) = beta * stationary_[j] + (i == j ? 1.0 - beta : 0.0);
    }
    steps_.push_back(std::move(q));
  }
  finish();
}

TransitionModel TransitionModel::from_matrices(std::vector<Matrix> steps,
                                               std::vector<double> limit) {
  if (steps.empty())
    throw std::invalid_argument("need at least one step");
  TransitionModel m;
  m.categories_ = steps.front().n;
  for (const Matrix &q: steps) {
    if (q.n != m.categories_)
      throw DimensionMismatch("step matrices differ in size");
  }
  check_distribution(limit, m.categories_, false);
  m.steps_ = std::move(steps);
  m.stationary_ = std::move(limit);
  m.finish();
  return m;
}

void TransitionModel::finish() {
  cumulative_.clear();
  cumulative_.push_back(Matrix::identity(categories_));
  for (const Matrix &q: steps_) {
    check_stochastic(q, "transition matrix");
    cumulative_.push_back(cumulative_.back() * q);
    check_stochastic(cumulative_.back(), "cumulative transition matrix");
  }
}

const Matrix &TransitionModel::step(int t) const {
  if (t < 1 || t > steps())
    throw TimestepOutOfRange("timestep " + std::to_string(t)
                             + " outside 1.." + std::to_string(steps()));
  return steps_[t - 1];
}

const Matrix &TransitionModel::cumulative(int t) const {
  if (t < 0 || t > steps())
    throw TimestepOutOfRange("timestep " + std::to_string(t)
                             + " outside 0.." + std::to_string(steps()));
  return cumulative_[t];
}

}  // namespace molforge
