//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <fstream>

#include "molforge/chemio.h"
#include "molforge/error.h"
#include "molforge/retro.h"

namespace molforge {
namespace {
bool by_prob_then_id(const Proposal &a, const Proposal &b) {
  if (a.prob != b.prob)
    return a.prob > b.prob;
  return a.template_id < b.template_id;
}

void truncate(std::vector<Proposal> &v, int k) {
  if (k >= 0 && v.size() > static_cast<std::size_t>(k))
    v.resize(k);
}
}  // namespace

void check_proposals(std::span<const Proposal> proposals) {
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    const double p = proposals[i].prob;
    if (!(p > 0.0 && p <= 1.0))
      throw PredictorUnavailable("proposal " + proposals[i].template_id
                                 + " has probability outside (0, 1]");
    if (i > 0 && p > proposals[i - 1].prob)
      throw PredictorUnavailable("proposals are not sorted by probability");
  }
}

TablePredictor TablePredictor::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open proposal table " + path.string());
  TablePredictor table;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    const std::string where = path.filename().string() + ":"
                              + std::to_string(number) + ": ";
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      std::vector<Proposal> proposals;
      for (const auto &p: j.at("proposals"))
        proposals.push_back({ p.at("template_id").get<std::string>(),
                              p.at("prob").get<double>(), std::nullopt });
      table.add(parse_smiles(j.at("product").get<std::string>()),
                std::move(proposals));
    } catch (const nlohmann::json::exception &e) {
      throw Error(where + e.what());
    } catch (const Error &e) {
      throw Error(where + e.what());
    }
  }
  return table;
}

void TablePredictor::add(const MolecularGraph &product,
                         std::vector<Proposal> proposals) {
  std::stable_sort(proposals.begin(), proposals.end(),
                   [](const Proposal &a, const Proposal &b) {
                     return a.prob > b.prob;
                   });
  check_proposals(proposals);
  table_[canonical_key(product)] = std::move(proposals);
}

std::vector<Proposal> TablePredictor::propose(const MolecularGraph &product,
                                              std::string_view, int k) {
  const auto it = table_.find(canonical_key(product));
  if (it == table_.end())
    return {};
  std::vector<Proposal> out = it->second;
  truncate(out, k);
  return out;
}

std::vector<Proposal>
TemplatePriorPredictor::propose(const MolecularGraph &product,
                                std::string_view, int k) {
  std::vector<Proposal> out;
  for (const RetroTemplate &t: library_.templates()) {
    try {
      if (!find_matches(t.product, product, 1).empty())
        out.push_back({ t.id, t.prior, std::nullopt });
    } catch (const MatchBudgetExceeded &) {
      continue;
    }
  }
  std::sort(out.begin(), out.end(), by_prob_then_id);
  truncate(out, k);
  return out;
}

const RetroTemplate *TemplateExpansion::resolve(const Proposal &p) {
  if (p.inline_template) {
    auto [it, fresh] = inline_.try_emplace(p.template_id, *p.inline_template);
    if (!fresh)
      it->second = *p.inline_template;
    return &it->second;
  }
  const auto it = inline_.find(p.template_id);
  return it != inline_.end() ? &it->second : library_.find(p.template_id);
}

std::vector<ReactionProposal>
TemplateExpansion::expand(const MolecularGraph &product,
                          std::string_view context, int k,
                          ExpansionStats &stats) {
  ++stats.predictor_calls;
  std::vector<Proposal> proposals = predictor_.propose(product, context, k);
  check_proposals(proposals);
  truncate(proposals, k);

  std::vector<ReactionProposal> out;
  for (const Proposal &p: proposals) {
    ++stats.proposals;
    const RetroTemplate *t = resolve(p);
    std::vector<ReactantSet> sets;
    if (t) {
      try {
        sets = apply_retro(*t, product);
      } catch (const TemplateUnsupported &) {
      } catch (const MatchBudgetExceeded &) {
      }
    }
    if (sets.empty()) {
      ++stats.proposals_dropped;
      continue;
    }
    for (ReactantSet &set: sets) {
      ++stats.reactions;
      out.push_back({ p.template_id, p.prob, std::move(set) });
    }
  }
  return out;
}

bool TemplateExpansion::validate(const std::string &template_id,
                                 std::span<const MolecularGraph> reactants,
                                 const MolecularGraph &product) {
  const auto it = inline_.find(template_id);
  const RetroTemplate *t =
      it != inline_.end() ? &it->second : library_.find(template_id);
  return t && validate_forward(*t, reactants, product);
}

}  // namespace molforge
