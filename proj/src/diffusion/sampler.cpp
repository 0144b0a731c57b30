//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molforge/diffusion.h"
#include "molforge/error.h"

namespace molforge {
namespace {
void check_timestep(const DiffusionModel &model, int t) {
  if (t < 1 || t > model.steps())
    throw TimestepOutOfRange("timestep " + std::to_string(t) + " outside 1.."
                             + std::to_string(model.steps()));
}

void check_shape(const DiffusionModel &model, const TokenGraph &x) {
  if (x.max_nodes != model.tokenization.max_nodes || x.n_nodes < 1
      || x.n_nodes > x.max_nodes
      || static_cast<int>(x.nodes.size()) != x.n_nodes
      || x.edges.size() != static_cast<std::size_t>(x.n_nodes) * x.max_nodes)
    throw DimensionMismatch("token graph does not match the tokenization");
}
}  // namespace

DiffusionModel make_diffusion_model(const DiffusionConfig &config) {
  const NoiseSchedule schedule = config.schedule == ScheduleFamily::kLinear
                                     ? NoiseSchedule::linear(config.steps)
                                     : NoiseSchedule::cosine(config.steps);
  const auto &tok = config.tokenization;
  if (config.family == TransitionFamily::kUniform) {
    return { tok,
             TransitionModel(schedule, config.family, tok.node_categories()),
             TransitionModel(schedule, config.family, tok.edge_categories()) };
  }
  return { tok,
           TransitionModel(schedule, config.family, tok.node_categories(),
                           config.node_marginal),
           TransitionModel(schedule, config.family, tok.edge_categories(),
                           config.edge_marginal) };
}

TokenGraph forward_sample(const DiffusionModel &model, const TokenGraph &x0,
                          int t, Rng &rng) {
  check_timestep(model, t);
  check_shape(model, x0);
  TokenGraph xt = x0;
  for (int i = 0; i < x0.n_nodes; ++i)
    xt.nodes[i] = sample_categorical(model.nodes.cumulative(t).row(x0.nodes[i]),
                                     rng);
  for (int i = 0; i < x0.n_nodes; ++i) {
    for (int j = 0; j < x0.n_nodes; ++j) {
      if (x0.active(i, j))
        xt.edge(i, j) =
            sample_categorical(model.edges.cumulative(t).row(x0.edge(i, j)),
                               rng);
    }
  }
  return xt;
}

TokenGraph stationary_sample(const DiffusionModel &model, int n_nodes,
                             Rng &rng) {
  TokenGraph x = empty_tokens(model.tokenization, n_nodes);
  for (int i = 0; i < n_nodes; ++i)
    x.nodes[i] = sample_categorical(model.nodes.stationary(), rng);
  for (int i = 0; i < n_nodes; ++i) {
    for (int j = 0; j < n_nodes; ++j) {
      if (x.active(i, j))
        x.edge(i, j) = sample_categorical(model.edges.stationary(), rng);
    }
  }
  return x;
}

ReverseStep reverse_step(const DiffusionModel &model, const TokenGraph &xt,
                         int t, Denoiser &denoiser, const ConditionVector &c,
                         const Guidance &guidance, Rng &rng) {
  check_timestep(model, t);
  check_shape(model, xt);
  const int fv = model.tokenization.node_categories();
  const int fe = model.tokenization.edge_categories();

  TokenDistributions p = denoiser.predict(xt, t, c);
  check_denoiser_output(p, xt, fv, fe);
  if (guidance.weight != 0.0) {
    const ConditionVector uncond =
        guidance.unconditional.value_or(c.dropped());
    const TokenDistributions pu = denoiser.predict(xt, t, uncond);
    check_denoiser_output(pu, xt, fv, fe);
    for (int i = 0; i < xt.n_nodes; ++i)
      p.nodes[i] = guided(p.nodes[i], pu.nodes[i], guidance.weight);
    for (int i = 0; i < xt.n_nodes; ++i) {
      for (int j = 0; j < xt.n_nodes; ++j) {
        if (!xt.active(i, j))
          continue;
        const std::size_t k = static_cast<std::size_t>(i) * xt.max_nodes + j;
        p.edges[k] = guided(p.edges[k], pu.edges[k], guidance.weight);
      }
    }
  }

  ReverseStep out { xt, {} };
  out.probabilities.nodes.resize(xt.n_nodes);
  out.probabilities.edges.resize(xt.edges.size());
  for (int i = 0; i < xt.n_nodes; ++i) {
    auto probs = posterior(model.nodes, xt.nodes[i], p.nodes[i], t);
    out.x.nodes[i] = sample_categorical(probs, rng);
    out.probabilities.nodes[i] = std::move(probs);
  }
  for (int i = 0; i < xt.n_nodes; ++i) {
    for (int j = 0; j < xt.n_nodes; ++j) {
      if (!xt.active(i, j))
        continue;
      const std::size_t k = static_cast<std::size_t>(i) * xt.max_nodes + j;
      auto probs = posterior(model.edges, xt.edge(i, j), p.edges[k], t);
      out.x.edge(i, j) = sample_categorical(probs, rng);
      out.probabilities.edges[k] = std::move(probs);
    }
  }
  return out;
}

DecodedGraph sample_graph(const DiffusionModel &model, Denoiser &denoiser,
                          const ConditionVector &c, const Guidance &guidance,
                          int n_nodes, std::uint64_t seed) {
  Rng rng(seed);
  TokenGraph x = stationary_sample(model, n_nodes, rng);
  TokenDistributions last;
  for (int t = model.steps(); t >= 1; --t) {
    ReverseStep step = reverse_step(model, x, t, denoiser, c, guidance, rng);
    x = std::move(step.x);
    last = std::move(step.probabilities);
  }
  return decode(x, &last, model.tokenization);
}

}  // namespace molforge
