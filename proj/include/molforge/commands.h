//
// MolForge - Copyright 2026 The MolForge Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLFORGE_COMMANDS_H_
#define MOLFORGE_COMMANDS_H_

#include <filesystem>
#include <ostream>
#include <string>

#include "molforge/config.h"

namespace molforge {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;      // usage, config and I/O errors
inline constexpr int kExitNoRoute = 2;    // plan only: the planner failed

// Output paths of "-" mean stdout. Diagnostics go to `err`.

int cmd_plan(const EngineConfig &config, const std::string &target,
             const std::string &output, std::ostream &err);

// `question` holds one benchmark-shaped record; only "question" is required.
int cmd_design(const EngineConfig &config, const std::filesystem::path &question,
               const std::string &output, std::ostream &err);

struct EvalArgs {
  std::filesystem::path benchmark;
  std::filesystem::path transcripts;  // empty with echo
  bool echo = false;
  std::filesystem::path oracle;       // empty: no property oracle
  std::string output = "-";           // report JSON
  std::string csv;                    // empty: next to the JSON report
};
int cmd_eval(const EngineConfig &config, const EvalArgs &args, std::ostream &err);

int cmd_sample(const EngineConfig &config, const std::string &output, std::ostream &err);

// Sends one expand, heuristic and denoise request to the configured provider
// and validates each reply.
int cmd_predictor_check(const EngineConfig &config, const std::string &product,
                        const std::string &output, std::ostream &err);

}  // namespace molforge

#endif  // MOLFORGE_COMMANDS_H_
