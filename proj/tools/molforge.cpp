//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "molforge/commands.h"
#include "molforge/config.h"
#include "molforge/error.h"

namespace {
using molforge::EngineConfig;

const char *type_name(molforge::ConfigKey::Type t) {
  using Type = molforge::ConfigKey::Type;
  switch (t) {
  case Type::kString: return "TEXT";
  case Type::kInt: return "INT";
  case Type::kSeed: return "UINT";
  case Type::kReal: return "REAL";
  case Type::kBool: return "BOOL";
  case Type::kList: return "A,B,...";
  }
  return "TEXT";
}

// Every config key becomes a flag on every subcommand, with the built-in
// default shown in --help.
struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> values;

  void attach(CLI::App &app) {
    app.add_option("--config", file, "TOML-style config file");
    const EngineConfig defaults;
    for (const molforge::ConfigKey &k: molforge::config_keys()) {
      app.add_option("--" + k.name, values[k.name], k.help)
          ->default_str(molforge::config_value_text(defaults, k.name))
          ->type_name(type_name(k.type))
          ->group("Config");
    }
  }

  EngineConfig resolve(const CLI::App &app) const {
    std::vector<std::pair<std::string, std::string>> flags;
    for (const molforge::ConfigKey &k: molforge::config_keys()) {
      if (app.count("--" + k.name) > 0)
        flags.emplace_back(k.name, values.at(k.name));
    }
    std::optional<std::filesystem::path> path;
    if (!file.empty())
      path = file;
    return molforge::resolve_config(path, flags, std::getenv("MOLFORGE_SEED"));
  }
};
}  // namespace

int main(int argc, char **argv) {
  CLI::App app { "molforge: molecular design, retrosynthesis planning and evaluation" };
  app.require_subcommand(1);

  std::map<std::string, ConfigFlags> flags;
  std::string output = "-";

  CLI::App *plan = app.add_subcommand("plan", "plan a synthesis route for a target");
  std::string target;
  plan->add_option("target", target, "target SMILES")->required();
  plan->add_option("-o,--output", output, "route or failure JSON")->capture_default_str();
  flags["plan"].attach(*plan);

  CLI::App *design = app.add_subcommand("design", "run one design session");
  std::string question;
  design->add_option("question", question, "question record JSON")->required();
  design->add_option("-o,--output", output, "transcript JSON")->capture_default_str();
  flags["design"].attach(*design);

  CLI::App *eval = app.add_subcommand("eval", "score transcripts against a benchmark");
  molforge::EvalArgs eval_args;
  std::string benchmark, transcripts, oracle, csv;
  eval->add_option("benchmark", benchmark, "benchmark JSONL")->required();
  eval->add_option("--transcripts", transcripts, "directory of <id>.json transcripts");
  eval->add_flag("--echo", eval_args.echo, "score the references against themselves");
  eval->add_option("--oracle", oracle, "property oracle JSONL");
  eval->add_option("-o,--output", output, "report JSON")->capture_default_str();
  eval->add_option("--csv", csv, "report CSV (default: next to the JSON report)");
  flags["eval"].attach(*eval);

  CLI::App *sample = app.add_subcommand("sample", "draw one graph from the diffusion sampler");
  sample->add_option("-o,--output", output, "graph JSON")->capture_default_str();
  flags["sample"].attach(*sample);

  CLI::App *check = app.add_subcommand("predictor-check",
                                       "validate a running provider against the wire protocol");
  std::string product = "CCO";
  check->add_option("--product", product, "probe molecule")->capture_default_str();
  check->add_option("-o,--output", output, "check report JSON")->capture_default_str();
  flags["predictor-check"].attach(*check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    // Help and version requests exit 0; every other parse error is a usage
    // error.
    const int code = app.exit(e);
    return code == 0 ? 0 : molforge::kExitUsage;
  }

  CLI::App *cmd = app.get_subcommands().front();
  EngineConfig config;
  try {
    config = flags.at(cmd->get_name()).resolve(*cmd);
  } catch (const molforge::Error &e) {
    std::cerr << "molforge " << cmd->get_name() << ": " << e.what() << "\n";
    return molforge::kExitUsage;
  }
  std::cerr << "# resolved config\n" << molforge::dump_config(config) << std::flush;

  if (cmd == plan)
    return molforge::cmd_plan(config, target, output, std::cerr);
  if (cmd == design)
    return molforge::cmd_design(config, question, output, std::cerr);
  if (cmd == eval) {
    eval_args.benchmark = benchmark;
    eval_args.transcripts = transcripts;
    eval_args.oracle = oracle;
    eval_args.output = output;
    eval_args.csv = csv;
    return molforge::cmd_eval(config, eval_args, std::cerr);
  }
  if (cmd == sample)
    return molforge::cmd_sample(config, output, std::cerr);
  return molforge::cmd_predictor_check(config, product, output, std::cerr);
}
