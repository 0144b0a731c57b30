//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_CONFIG_H_
#define MOLFORGE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "molforge/diffusion.h"
#include "molforge/orchestrator.h"
#include "molforge/retro.h"

namespace molforge {

struct DiffusionSection {
  std::string family = "uniform";    // uniform | marginal
  std::string schedule = "cosine";   // cosine | linear
  int steps = 500;                   // T
  double guidance_w = 2.0;
  std::vector<std::string> node_vocabulary = { "C", "N", "O", "S", "P",
                                               "F", "Cl", "Br", "I", "*" };
  int max_nodes = kDefaultMaxNodes;  // N_G
  int condition_dim = kDefaultConditionDim;
  std::string denoiser = "uniform";  // uniform | oracle | wire
  std::string oracle_smiles = "c1ccccc1";
  int n_nodes = 0;                   // 0: the oracle molecule's size, else 9
};

struct PlannerSection {
  int k = kDefaultTopK;
  int max_iterations = kDefaultMaxIterations;
  double max_seconds = kDefaultMaxSeconds;
  std::string stock;
  std::string templates;
  std::string heuristic = "zero";    // zero | predictor
  bool stop_at_first_route = false;
};

struct PredictorSection {
  std::string mode = "builtin-table";  // builtin-table | subprocess | tcp
  std::string table;                   // empty: template priors
  std::string command;
  std::string address;                 // host:port
  double timeout = 60.0;
};

struct OrchestratorSection {
  std::string lm;  // scripted LM JSON
  int design_retries = 3;
  int max_tokens = 512;
  bool greedy = true;
  double temperature = 1.0;
};

struct EngineConfig {
  std::uint64_t seed = 0;
  DiffusionSection diffusion;
  PlannerSection planner;
  PredictorSection predictor;
  OrchestratorSection orchestrator;

  DiffusionConfig diffusion_config() const;
  PlannerConfig planner_config() const;
  OrchestratorConfig orchestrator_config() const;
};

// One settable key, "section.name" or "seed".
struct ConfigKey {
  enum class Type { kString, kInt, kReal, kBool, kList, kSeed };
  std::string name;
  Type type;
  bool is_path = false;
  std::string help;
};

const std::vector<ConfigKey> &config_keys();
// Current value as a TOML literal.
std::string config_value_text(const EngineConfig &c, const std::string &key);

// Applies a command-line style value ("3", "true", "a,b,c", raw strings).
// Throws ConfigError for unknown keys and malformed values.
void set_config_value(EngineConfig &c, const std::string &key, const std::string &text);

// Parses the TOML subset used by config files: [section] headers, key =
// value pairs with strings, integers, reals, booleans and flat arrays, and
// '#' comments. Relative paths resolve against `base_dir`. `origin` prefixes
// error messages ("origin:line: ...").
void apply_config_text(EngineConfig &c, std::string_view text, const std::string &origin,
                       const std::filesystem::path &base_dir = {});
EngineConfig load_config(const std::filesystem::path &path);

// Precedence: defaults, then the file, then MOLFORGE_SEED, then flags.
EngineConfig resolve_config(const std::optional<std::filesystem::path> &file,
                            const std::vector<std::pair<std::string, std::string>> &flags,
                            const char *env_seed);

// Throws ConfigError for values outside their domains.
void validate_config(const EngineConfig &c);

// Loadable TOML text for every key.
std::string dump_config(const EngineConfig &c);

}  // namespace molforge

#endif  // MOLFORGE_CONFIG_H_
