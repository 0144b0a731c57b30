//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <sstream>

#include "molforge/error.h"
#include "molforge/retro.h"

namespace molforge {

double heuristic_score(std::span<const double> probs) {
  if (probs.size() != kChoiceScores.size())
    throw BadDistribution("heuristic needs " + std::to_string(kHeuristicChoices)
                          + " choice probabilities, got "
                          + std::to_string(probs.size()));
  double sum = 0.0, score = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0) || !std::isfinite(probs[i]))
      throw BadDistribution("negative or non-finite choice probability");
    sum += probs[i];
    score += probs[i] * kChoiceScores[i];
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw BadDistribution("choice probabilities sum to " + std::to_string(sum));
  return score;
}

std::string heuristic_prompt(const HeuristicQuery &q) {
  std::ostringstream out;
  out << "Estimate remaining steps for the target " << q.target
      << " given the following parameters:\n"
      << "Current step " << q.step << ",\n"
      << "Current template: " << q.template_id.value_or("none") << ",\n"
      << "Reactants: ";
  if (q.reactants && !q.reactants->empty()) {
    for (std::size_t i = 0; i < q.reactants->size(); ++i)
      out << (i ? ", " : "") << (*q.reactants)[i];
  } else {
    out << "none";
  }
  out << ".\n"
      << "Consider the following factors:\n"
      << "1. Intermediate complexity\n"
      << "2. Reagent availability\n"
      << "3. Side reactions\n"
      << "4. Stereochemistry challenges.\n"
      << "A. All readily available\n"
      << "B. Some commercial, some need 1-2 steps\n"
      << "C. Mix of commercial and multi-step synthesis\n"
      << "D. Mostly require complex synthesis\n"
      << "E. All require extensive multi-step synthesis\n";
  return out.str();
}

std::array<double, kHeuristicChoices>
ZeroHeuristic::probabilities(const HeuristicQuery &) {
  return { 1.0, 0.0, 0.0, 0.0, 0.0 };
}

}  // namespace molforge
