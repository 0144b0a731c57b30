//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <sstream>

#include "molforge/chemio.h"
#include "molforge/error.h"
#include "molforge/orchestrator.h"

namespace molforge {
namespace {
void route_paragraphs(const RouteNode &node, std::vector<SessionElement> &out,
                      int &step) {
  for (const RouteReaction &r: node.reaction) {
    ReactionElement rx;
    rx.product = node.smiles;
    rx.template_id = r.template_id;
    rx.prob = r.prob;
    std::string joined;
    for (const RouteNode &c: r.reactants) {
      rx.reactants.push_back(c.smiles);
      joined += (joined.empty() ? "" : " + ") + c.smiles;
    }
    std::ostringstream text;
    text << "Step " << ++step << ": " << node.smiles << " is made from " << joined
         << " by " << r.template_id << ".";
    SessionElement para;
    para.text = text.str();
    out.push_back(std::move(para));
    SessionElement e;
    e.kind = ElementKind::kReaction;
    e.reaction = std::move(rx);
    out.push_back(std::move(e));
    for (const RouteNode &c: r.reactants)
      route_paragraphs(c, out, step);
  }
}

SessionElement failure_element(nlohmann::json marker) {
  SessionElement e;
  e.kind = ElementKind::kFailure;
  e.failure = std::move(marker);
  return e;
}
}  // namespace

std::string to_string(SessionState s) {
  switch (s) {
  case SessionState::kText: return "text";
  case SessionState::kDesignQuery: return "design_query";
  case SessionState::kDesigning: return "designing";
  case SessionState::kRetroQuery: return "retro_query";
  case SessionState::kRetro: return "retro";
  case SessionState::kCallback: return "callback";
  }
  return "?";
}

std::string to_string(ElementKind k) {
  switch (k) {
  case ElementKind::kText: return "text";
  case ElementKind::kMolecule: return "molecule";
  case ElementKind::kReaction: return "reaction";
  case ElementKind::kCallback: return "callback";
  case ElementKind::kFailure: return "failure";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// LM-backed heuristic

LmHeuristic::LmHeuristic(LanguageModel &lm, const TokenVocabulary &vocab)
    : lm_(lm), vocab_(vocab) {
  int k = 0;
  for (const char *letter: { "A", "B", "C", "D", "E" })
    letters_[k++] = *vocab.find(letter);
}

std::array<double, kHeuristicChoices>
LmHeuristic::probabilities(const HeuristicQuery &q) {
  const std::vector<int> prompt = vocab_.encode_words(heuristic_prompt(q));
  const std::vector<Embedding> none(prompt.size());
  const LmOutput out = lm_.forward(prompt, none, LmPurpose::kHeuristic);
  if (static_cast<int>(out.next.size()) != vocab_.size())
    throw PredictorUnavailable("model distribution does not match the vocabulary");
  std::array<double, kHeuristicChoices> p {};
  double total = 0.0;
  for (int i = 0; i < kHeuristicChoices; ++i) {
    p[i] = out.next[letters_[i]];
    total += p[i];
  }
  if (!(total > 0.0))
    throw PredictorUnavailable("model put no mass on the answer letters");
  for (double &x: p)
    x /= total;
  return p;
}

// ---------------------------------------------------------------------------
// Orchestrator

Orchestrator::Orchestrator(const TokenVocabulary &vocab, LanguageModel &lm,
                           GraphEncoder &encoder, MoleculeSampler &sampler,
                           AffineProjection projection, OrchestratorConfig config,
                           RetroInputs retro)
    : vocab_(vocab), lm_(lm), encoder_(encoder), sampler_(sampler),
      projection_(std::move(projection)), config_(std::move(config)),
      retro_(std::move(retro)), rng_(config_.seed) {
  if (projection_.in_dim != lm.hidden_dim())
    throw DimensionMismatch("query projection expects "
                            + std::to_string(projection_.in_dim)
                            + " inputs but the model's hidden size is "
                            + std::to_string(lm.hidden_dim()));
  if (encoder.dim() != lm.hidden_dim())
    throw DimensionMismatch("graph encoder output does not match the model's "
                            "hidden size");
  if (config_.design_retries < 1)
    throw ConfigError("design retries must be at least 1");
}

GenerationSession Orchestrator::start(std::string_view question,
                                      ConditionVector properties) const {
  GenerationSession s;
  s.tokens = vocab_.encode_words(question);
  s.embeddings.assign(s.tokens.size(), std::nullopt);
  s.context_mark = s.tokens.size();
  s.properties = std::move(properties);
  return s;
}

void Orchestrator::emit(GenerationSession &s, int id, Embedding e) {
  s.tokens.push_back(id);
  s.embeddings.push_back(std::move(e));
}

void Orchestrator::emit_special(GenerationSession &s, SpecialToken t) {
  emit(s, vocab_.special(t));
}

void Orchestrator::append_text(GenerationSession &s, ElementKind kind, int id) {
  const bool open = !s.elements.empty() && s.elements.back().kind == kind
                    && !s.tokens.empty() && !vocab_.is_special(s.tokens.back());
  emit(s, id);
  if (open) {
    s.elements.back().text += ' ';
  } else {
    SessionElement e;
    e.kind = kind;
    s.elements.push_back(std::move(e));
  }
  s.elements.back().text += vocab_.text(id);
}

void Orchestrator::enter_callback(GenerationSession &s, SpecialToken origin) {
  emit_special(s, SpecialToken::kCallbackStart);
  s.state = SessionState::kCallback;
  s.callback_origin = static_cast<int>(origin);
}

void Orchestrator::violation(GenerationSession &s, int id, std::string why) {
  s.violations.push_back("token " + std::to_string(s.tokens.size()) + " "
                         + std::string(vocab_.text(id)) + ": " + why);
}

void Orchestrator::finish(GenerationSession &s) {
  if (s.state == SessionState::kCallback) {
    emit_special(s, SpecialToken::kCallbackEnd);
    s.state = SessionState::kText;
    s.callback_origin = -1;
  }
  s.finished = true;
}

int Orchestrator::pick(const std::vector<double> &dist) {
  if (static_cast<int>(dist.size()) != vocab_.size())
    throw ProtocolViolation("model distribution has "
                            + std::to_string(dist.size()) + " entries for a "
                            + std::to_string(vocab_.size()) + "-token vocabulary");
  double total = 0.0;
  for (double p: dist) {
    if (!(p >= 0.0))
      throw ProtocolViolation("model distribution has a negative entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6)
    throw ProtocolViolation("model distribution is not normalized");
  if (config_.greedy) {
    // First maximum, so ties resolve to the lower id.
    return static_cast<int>(std::max_element(dist.begin(), dist.end()) - dist.begin());
  }
  std::vector<double> tempered(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i)
    tempered[i] = dist[i] > 0 ? std::pow(dist[i], 1.0 / config_.temperature) : 0.0;
  return sample_categorical(tempered, rng_);
}

void Orchestrator::step(GenerationSession &s) {
  if (s.finished)
    throw ProtocolViolation("session already finished");
  switch (s.state) {
  case SessionState::kDesignQuery:
  case SessionState::kRetroQuery: {
    emit(s, s.pending.front());
    s.pending.pop_front();
    const LmOutput out = lm_.forward(s.tokens, s.embeddings, LmPurpose::kQuery);
    if (static_cast<int>(out.hidden.size()) != lm_.hidden_dim())
      throw DimensionMismatch("model returned a hidden vector of the wrong size");
    s.query_vectors.push_back(out.hidden);
    if (s.pending.empty())
      s.state = s.state == SessionState::kDesignQuery ? SessionState::kDesigning
                                                      : SessionState::kRetro;
    return;
  }
  case SessionState::kDesigning:
    run_design(s);
    return;
  case SessionState::kRetro:
    run_retro(s);
    return;
  case SessionState::kText:
  case SessionState::kCallback:
    break;
  }

  const LmOutput out = lm_.forward(s.tokens, s.embeddings, LmPurpose::kNextToken);
  const int id = pick(out.next);
  if (id == vocab_.end_of_sequence()) {
    finish(s);
    return;
  }
  const auto special = vocab_.as_special(id);
  if (!special) {
    append_text(s, s.state == SessionState::kCallback ? ElementKind::kCallback
                                                      : ElementKind::kText,
                id);
    return;
  }
  if (s.state == SessionState::kCallback) {
    if (*special == SpecialToken::kCallbackEnd) {
      emit(s, id);
      s.state = SessionState::kText;
      s.callback_origin = -1;
    } else {
      violation(s, id, "only <callback_end> may close a callback");
    }
    return;
  }
  switch (*special) {
  case SpecialToken::kDesignStart:
  case SpecialToken::kRetroStart: {
    const bool design = *special == SpecialToken::kDesignStart;
    emit(s, id);
    s.state = design ? SessionState::kDesignQuery : SessionState::kRetroQuery;
    s.query_vectors.clear();
    s.pending.assign(kQueryTokens,
                     vocab_.special(design ? SpecialToken::kDesignBody
                                           : SpecialToken::kRetroBody));
    return;
  }
  default:
    violation(s, id, "not allowed in the text state");
    return;
  }
}

void Orchestrator::run_design(GenerationSession &s) {
  if (s.state != SessionState::kDesigning
      || s.query_vectors.size() != static_cast<std::size_t>(kQueryTokens))
    throw ProtocolViolation("design needs eight collected query vectors");
  ConditionVector c = s.properties;
  c.text = query_condition(s.query_vectors, projection_);
  s.query_vectors.clear();

  std::string last_error = "sample failed the valence check";
  bool unavailable = false;
  for (int attempt = 0; attempt < config_.design_retries; ++attempt) {
    std::optional<MolecularGraph> g;
    try {
      DecodedGraph d = sampler_.sample(c, attempt);
      if (check_valence(d.graph).valid)
        g = std::move(d.graph);
      unavailable = false;
    } catch (const PredictorUnavailable &e) {
      last_error = e.what();
      unavailable = true;
    } catch (const Error &e) {
      last_error = e.what();
      unavailable = false;
    }
    if (!g)
      continue;
    emit(s, vocab_.special(SpecialToken::kMolecule), encoder_.encode(*g));
    SessionElement e;
    e.kind = ElementKind::kMolecule;
    e.molecule = *g;
    s.elements.push_back(std::move(e));
    s.target = std::move(g);
    s.context_mark = s.tokens.size();
    emit_special(s, SpecialToken::kDesignEnd);
    s.state = SessionState::kText;
    return;
  }
  s.elements.push_back(failure_element({ { "module", "design" },
                                         { "reason", unavailable ? "predictor_unavailable"
                                                                 : "no_valid_molecule" },
                                         { "attempts", config_.design_retries },
                                         { "message", last_error } }));
  enter_callback(s, SpecialToken::kDesignStart);
}

void Orchestrator::run_retro(GenerationSession &s) {
  if (s.state != SessionState::kRetro
      || s.query_vectors.size() != static_cast<std::size_t>(kQueryTokens))
    throw ProtocolViolation("retro needs eight collected query vectors");
  s.query_vectors.clear();
  auto fail = [&](nlohmann::json marker) {
    marker["module"] = "retro";
    s.elements.push_back(failure_element(std::move(marker)));
    enter_callback(s, SpecialToken::kRetroStart);
  };
  if (!s.target)
    return fail({ { "reason", "no_target" } });
  if (!retro_.stock || !retro_.source)
    return fail({ { "reason", "retro_unavailable" } });

  const std::string context = vocab_.detokenize(
      std::span<const int>(s.tokens).subspan(s.context_mark));
  LmHeuristic heuristic(lm_, vocab_);
  PlanResult result;
  try {
    result = plan(*s.target, *retro_.stock, *retro_.source, heuristic,
                  config_.planner, context, retro_.clock);
  } catch (const PredictorUnavailable &e) {
    return fail({ { "reason", "predictor_unavailable" }, { "message", e.what() } });
  } catch (const Error &e) {
    return fail({ { "reason", "error" }, { "message", e.what() } });
  }
  if (!result.ok()) {
    nlohmann::json marker = plan_result_to_json(result)["failure"];
    return fail(std::move(marker));
  }
  const Route &route = *result.route;
  if (route.steps == 0) {
    SessionElement e;
    e.text = route.root.smiles + " is available in stock.";
    s.elements.push_back(std::move(e));
  } else {
    int step = 0;
    route_paragraphs(route.root, s.elements, step);
  }
  s.route = route;
  emit_special(s, SpecialToken::kRetroEnd);
  s.state = SessionState::kText;
}

void Orchestrator::run(GenerationSession &s) {
  int steps = 0;
  while (!s.finished) {
    const bool model_turn =
        s.state == SessionState::kText || s.state == SessionState::kCallback;
    if (model_turn && steps >= config_.max_tokens) {
      finish(s);
      break;
    }
    step(s);
    ++steps;
  }
}

// ---------------------------------------------------------------------------
// Transcripts

nlohmann::json session_to_json(const GenerationSession &s,
                               const TokenVocabulary &vocab) {
  nlohmann::json tokens = nlohmann::json::array();
  for (int id: s.tokens)
    tokens.push_back(std::string(vocab.text(id)));
  nlohmann::json elements = nlohmann::json::array();
  for (const SessionElement &e: s.elements) {
    nlohmann::json j = { { "kind", to_string(e.kind) } };
    switch (e.kind) {
    case ElementKind::kText:
    case ElementKind::kCallback:
      j["text"] = e.text;
      break;
    case ElementKind::kMolecule:
      j["smiles"] = write_smiles(*e.molecule);
      j["graph"] = graph_to_json(*e.molecule);
      break;
    case ElementKind::kReaction:
      j["product"] = e.reaction->product;
      j["template_id"] = e.reaction->template_id;
      j["prob"] = e.reaction->prob;
      j["reactants"] = e.reaction->reactants;
      break;
    case ElementKind::kFailure:
      j["failure"] = e.failure;
      break;
    }
    elements.push_back(std::move(j));
  }
  nlohmann::json out = { { "tokens", tokens },
                         { "elements", elements },
                         { "state", to_string(s.state) },
                         { "violations", s.violations } };
  if (s.route)
    out["route"] = route_to_json(*s.route);
  return out;
}

std::optional<MolecularGraph> transcript_molecule(const nlohmann::json &transcript) {
  if (!transcript.is_object() || !transcript.contains("elements"))
    return std::nullopt;
  for (const auto &e: transcript["elements"]) {
    if (e.value("kind", "") != "molecule")
      continue;
    try {
      if (e.contains("graph"))
        return graph_from_json(e["graph"]);
      return parse_smiles(e.at("smiles").get<std::string>());
    } catch (const Error &) {
      return std::nullopt;
    } catch (const nlohmann::json::exception &) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::string transcript_text(const nlohmann::json &transcript) {
  std::string out;
  if (!transcript.is_object() || !transcript.contains("elements"))
    return out;
  for (const auto &e: transcript["elements"]) {
    const std::string kind = e.value("kind", "");
    if (kind != "text" && kind != "callback")
      continue;
    const std::string t = e.value("text", "");
    if (t.empty())
      continue;
    if (!out.empty())
      out += ' ';
    out += t;
  }
  return out;
}

std::optional<Route> transcript_route(const nlohmann::json &transcript) {
  if (!transcript.is_object() || !transcript.contains("route"))
    return std::nullopt;
  try {
    return route_from_json(transcript["route"]);
  } catch (const Error &) {
    return std::nullopt;
  } catch (const nlohmann::json::exception &) {
    return std::nullopt;
  }
}

}  // namespace molforge
