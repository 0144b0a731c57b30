//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molforge/commands.h"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "molforge/chemio.h"
#include "molforge/error.h"
#include "molforge/eval.h"
#include "molforge/orchestrator.h"
#include "molforge/wire.h"

namespace molforge {
namespace {
void write_text(const std::string &output, const std::string &text) {
  if (output == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out)
    throw ConfigError("cannot write " + output);
  out << text;
  if (!out.flush())
    throw ConfigError("cannot write " + output);
}

void write_json(const std::string &output, const nlohmann::json &j) {
  write_text(output, j.dump(2) + "\n");
}

std::unique_ptr<WireClient> connect_provider(const EngineConfig &c) {
  const auto &p = c.predictor;
  if (p.mode == "subprocess")
    return std::make_unique<WireClient>(std::make_unique<SubprocessTransport>(p.command, p.timeout));
  if (p.mode == "tcp")
    return std::make_unique<WireClient>(TcpTransport::connect(p.address, p.timeout));
  return nullptr;
}

// Everything the planner needs, owned in one place.
struct RetroBackend {
  Stock stock;
  TemplateLibrary library;
  std::unique_ptr<Predictor> local;
  std::unique_ptr<WirePredictor> remote;
  std::unique_ptr<TemplateExpansion> expansion;

  Predictor &predictor() { return remote ? static_cast<Predictor &>(*remote) : *local; }
};

std::unique_ptr<RetroBackend> make_backend(const EngineConfig &c, WireClient *client) {
  if (c.planner.stock.empty())
    throw ConfigError("planner.stock is not set");
  if (c.planner.templates.empty())
    throw ConfigError("planner.templates is not set");
  auto b = std::make_unique<RetroBackend>();
  try {
    b->stock = Stock::load(c.planner.stock);
    b->library = TemplateLibrary::load(c.planner.templates);
    if (client) {
      b->remote = std::make_unique<WirePredictor>(*client);
    } else if (!c.predictor.table.empty()) {
      b->local = std::make_unique<TablePredictor>(TablePredictor::load(c.predictor.table));
    } else {
      b->local = std::make_unique<TemplatePriorPredictor>(b->library);
    }
  } catch (const ConfigError &) {
    throw;
  } catch (const std::exception &e) {
    throw ConfigError(e.what());
  }
  b->expansion = std::make_unique<TemplateExpansion>(b->predictor(), b->library);
  return b;
}

int n_nodes_for(const EngineConfig &c, const std::optional<MolecularGraph> &oracle) {
  if (c.diffusion.n_nodes > 0)
    return c.diffusion.n_nodes;
  return oracle ? static_cast<int>(oracle->atom_count()) : 9;
}

struct DenoiserBundle {
  std::unique_ptr<Denoiser> denoiser;
  std::optional<MolecularGraph> oracle;
};

DenoiserBundle make_denoiser(const EngineConfig &c, const DiffusionModel &model,
                             WireClient *client) {
  DenoiserBundle b;
  const auto &tok = model.tokenization;
  if (c.diffusion.denoiser == "oracle") {
    try {
      b.oracle = parse_smiles(c.diffusion.oracle_smiles);
      b.denoiser = std::make_unique<OracleDenoiser>(tokenize(*b.oracle, tok), tok);
    } catch (const Error &e) {
      throw ConfigError(std::string("diffusion.oracle_smiles: ") + e.what());
    }
  } else if (c.diffusion.denoiser == "wire") {
    b.denoiser = std::make_unique<WireDenoiser>(*client, tok);
  } else {
    b.denoiser = std::make_unique<UniformDenoiser>(tok);
  }
  return b;
}

// Reports in-band failures on stderr so operators see them without reading
// the transcript.
void report_failures(const nlohmann::json &transcript, std::ostream &err) {
  for (const auto &e: transcript["elements"]) {
    if (e.value("kind", "") != "failure")
      continue;
    const auto &f = e["failure"];
    const std::string reason = f.value("reason", "unknown");
    err << "molforge: " << f.value("module", "session") << " failed: " << reason;
    if (reason == "predictor_unavailable")
      err << " (PredictorUnavailable)";
    if (f.contains("message"))
      err << ": " << f["message"].get<std::string>();
    err << "\n";
  }
}

nlohmann::json read_json_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// Host-side property slots: annotations in the question, overridden by the
// record's own property block.
ConditionVector record_properties(const nlohmann::json &record, const std::string &question) {
  const PropertySchema schema = PropertySchema::benchmark();
  ConditionVector c = extract_properties(question, schema);
  if (!record.contains("properties"))
    return c;
  for (const auto &[name, p]: record["properties"].items()) {
    const double v = p.is_object() ? p.at("value").get<double>() : p.get<double>();
    for (std::size_t i = 0; i < schema.categorical.size(); ++i) {
      if (schema.categorical[i] == name) {
        if (v != 0.0 && v != 1.0)
          throw ConfigError("categorical property " + name + " must be 0 or 1");
        c.categorical[i] = static_cast<int>(v);
      }
    }
    for (std::size_t i = 0; i < schema.continuous.size(); ++i) {
      if (schema.continuous[i] == name)
        c.continuous[i] = v;
    }
  }
  return c;
}
}  // namespace

int cmd_plan(const EngineConfig &config, const std::string &target,
             const std::string &output, std::ostream &err) {
  std::optional<MolecularGraph> g;
  std::unique_ptr<WireClient> client;
  std::unique_ptr<RetroBackend> backend;
  try {
    g = parse_smiles(target);
    client = connect_provider(config);
    backend = make_backend(config, client.get());
  } catch (const Error &e) {
    err << "molforge plan: " << e.what() << "\n";
    return kExitUsage;
  }
  ZeroHeuristic zero;
  HeuristicProvider &heuristic =
      config.planner.heuristic == "predictor" ? static_cast<HeuristicProvider &>(*backend->remote)
                                              : zero;
  PlanResult result;
  try {
    result = plan(*g, backend->stock, *backend->expansion, heuristic, config.planner_config());
  } catch (const PredictorUnavailable &e) {
    err << "molforge plan: PredictorUnavailable: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error &e) {
    err << "molforge plan: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    write_json(output, plan_result_to_json(result));
  } catch (const Error &e) {
    err << "molforge plan: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!result.ok()) {
    err << "molforge plan: no route: " << to_string(result.failure->reason) << "\n";
    return kExitNoRoute;
  }
  return kExitOk;
}

int cmd_design(const EngineConfig &config, const std::filesystem::path &question,
               const std::string &output, std::ostream &err) {
  try {
    const nlohmann::json record = read_json_file(question);
    if (!record.is_object() || !record.contains("question") || !record["question"].is_string())
      throw ConfigError(question.string() + ": record needs a \"question\" string");
    const std::string text = record["question"].get<std::string>();
    const ConditionVector properties = record_properties(record, text);
    if (config.orchestrator.lm.empty())
      throw ConfigError("orchestrator.lm is not set");

    // The provider connection is lazy in effect: nothing is sent until a
    // module asks, so a dead provider surfaces in-band.
    std::unique_ptr<WireClient> client;
    try {
      client = connect_provider(config);
    } catch (const PredictorUnavailable &e) {
      err << "molforge design: PredictorUnavailable: " << e.what() << "\n";
    }
    const bool wants_provider = config.predictor.mode != "builtin-table";

    TokenVocabulary vocab;
    ScriptedLM lm = ScriptedLM::load(vocab, config.orchestrator.lm);
    // Prompt words join the vocabulary so the transcript keeps them legible.
    std::istringstream words(text);
    for (std::string w; words >> w;) {
      if (!vocab.find(w))
        vocab.add_word(w);
    }
    FingerprintEncoder encoder(lm.hidden_dim(), config.seed);
    const DiffusionModel model = make_diffusion_model(config.diffusion_config());

    class Unavailable: public Denoiser {
    public:
      TokenDistributions predict(const TokenGraph &, int, const ConditionVector &) override {
        throw PredictorUnavailable("no provider connection");
      }
    };
    DenoiserBundle denoiser;
    if (config.diffusion.denoiser == "wire" && !client) {
      denoiser.denoiser = std::make_unique<Unavailable>();
    } else {
      denoiser = make_denoiser(config, model, client.get());
    }
    DiffusionSampler sampler(model, *denoiser.denoiser, Guidance { config.diffusion.guidance_w, {} },
                             n_nodes_for(config, denoiser.oracle), config.seed);

    std::unique_ptr<RetroBackend> backend;
    RetroInputs retro;
    if (!config.planner.stock.empty() && !config.planner.templates.empty()
        && (!wants_provider || client)) {
      backend = make_backend(config, client.get());
      retro.stock = &backend->stock;
      retro.source = backend->expansion.get();
    } else if (wants_provider && !client) {
      err << "molforge design: retro disabled, provider unavailable\n";
    }

    Orchestrator orch(vocab, lm, encoder, sampler,
                      AffineProjection::random(lm.hidden_dim(), config.diffusion.condition_dim,
                                               config.seed),
                      config.orchestrator_config(), retro);
    GenerationSession s = orch.start(text, properties);
    orch.run(s);
    nlohmann::json transcript = session_to_json(s, vocab);
    transcript["id"] = record.value("id", question.stem().string());
    transcript["question"] = text;
    report_failures(transcript, err);
    write_json(output, transcript);
    return kExitOk;
  } catch (const Error &e) {
    err << "molforge design: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception &e) {
    err << "molforge design: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_eval(const EngineConfig &config, const EvalArgs &args, std::ostream &err) {
  try {
    if (args.echo == !args.transcripts.empty())
      throw ConfigError("pass exactly one of a transcripts directory or --echo");
    const std::vector<BenchmarkRecord> records = load_benchmark(args.benchmark);
    TableOracle oracle;
    if (!args.oracle.empty())
      oracle = TableOracle::load(args.oracle);

    std::optional<Stock> stock;
    std::optional<TemplateLibrary> library;
    try {
      if (!config.planner.stock.empty())
        stock = Stock::load(config.planner.stock);
      if (!config.planner.templates.empty())
        library = TemplateLibrary::load(config.planner.templates);
    } catch (const ConfigError &) {
      throw;
    } catch (const std::exception &e) {
      throw ConfigError(e.what());
    }
    if (!stock)
      err << "molforge eval: planner.stock is not set; retro success will be 0\n";

    EchoSystem echo;
    if (!args.echo && !std::filesystem::is_directory(args.transcripts))
      throw ConfigError("not a directory: " + args.transcripts.string());
    TranscriptDirectory dir(args.transcripts);
    BenchmarkSystem &system = args.echo ? static_cast<BenchmarkSystem &>(echo) : dir;
    const MetricReport report =
        run_benchmark(records, system, oracle,
                      { stock ? &*stock : nullptr, library ? &*library : nullptr });
    for (const std::string &w: report.warnings)
      err << "molforge eval: warning: " << w << "\n";

    write_json(args.output, report_to_json(report));
    std::string csv = args.csv;
    if (csv.empty() && args.output != "-")
      csv = std::filesystem::path(args.output).replace_extension(".csv").string();
    if (!csv.empty())
      write_text(csv, report_to_csv(report));
    return kExitOk;
  } catch (const Error &e) {
    err << "molforge eval: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_sample(const EngineConfig &config, const std::string &output, std::ostream &err) {
  try {
    std::unique_ptr<WireClient> client = connect_provider(config);
    const DiffusionModel model = make_diffusion_model(config.diffusion_config());
    DenoiserBundle denoiser = make_denoiser(config, model, client.get());
    const int n = n_nodes_for(config, denoiser.oracle);
    const DecodedGraph d = sample_graph(model, *denoiser.denoiser, ConditionVector {},
                                        Guidance { config.diffusion.guidance_w, {} }, n,
                                        config.seed);
    nlohmann::json j = { { "seed", config.seed },
                         { "n_nodes", n },
                         { "steps", model.steps() },
                         { "valid", d.validity.valid },
                         { "graph", graph_to_json(d.graph) } };
    try {
      j["smiles"] = write_smiles(d.graph);
    } catch (const Error &) {
      j["smiles"] = nullptr;
    }
    write_json(output, j);
    return kExitOk;
  } catch (const Error &e) {
    err << "molforge sample: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_predictor_check(const EngineConfig &config, const std::string &product,
                        const std::string &output, std::ostream &err) {
  if (config.predictor.mode == "builtin-table") {
    err << "molforge predictor-check: predictor.mode must be subprocess or tcp\n";
    return kExitUsage;
  }
  std::optional<MolecularGraph> g;
  std::unique_ptr<WireClient> client;
  try {
    g = parse_smiles(product);
    client = connect_provider(config);
  } catch (const Error &e) {
    err << "molforge predictor-check: " << e.what() << "\n";
    return kExitUsage;
  }
  WirePredictor predictor(*client);
  nlohmann::json checks = nlohmann::json::array();
  bool ok = true;
  auto run = [&](const char *name, auto &&body) {
    nlohmann::json c = { { "check", name } };
    try {
      c["detail"] = body();
      c["ok"] = true;
    } catch (const std::exception &e) {
      c["ok"] = false;
      c["error"] = e.what();
      ok = false;
    }
    checks.push_back(std::move(c));
  };
  run("expand", [&] {
    const auto proposals = predictor.propose(*g, "", config.planner.k);
    nlohmann::json out = nlohmann::json::array();
    for (const Proposal &p: proposals)
      out.push_back({ { "template_id", p.template_id }, { "prob", p.prob } });
    return out;
  });
  run("heuristic", [&] {
    const auto probs = predictor.probabilities({ write_smiles(*g), 0, std::nullopt, std::nullopt });
    return nlohmann::json { { "probs", probs }, { "score", heuristic_score(probs) } };
  });
  run("denoise", [&] {
    const DiffusionModel model = make_diffusion_model(config.diffusion_config());
    WireDenoiser denoiser(*client, model.tokenization);
    const TokenGraph x = empty_tokens(model.tokenization, 2);
    denoiser.predict(x, 1, ConditionVector {});
    return nlohmann::json { { "nodes", 2 }, { "t", 1 } };
  });
  try {
    write_json(output, { { "ok", ok }, { "checks", checks } });
  } catch (const Error &e) {
    err << "molforge predictor-check: " << e.what() << "\n";
    return kExitUsage;
  }
  for (const auto &c: checks) {
    if (!c["ok"].get<bool>())
      err << "molforge predictor-check: " << c["check"].get<std::string>() << ": "
          << c["error"].get<std::string>() << "\n";
  }
  return ok ? kExitOk : kExitUsage;
}

}  // namespace molforge
