// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <json.hpp>

#include "toralrig/config.hpp"

namespace toralrig {

inline constexpr const char* kReportSchema = "toralrig.report/1";

enum class Command { Analyze, Certify, Rigidity };

// Exit codes shared with the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailed = 1,   // a stage failed or a residual exceeded its tolerance
  kExitConfig = 2,   // configuration or I/O problem
  kExitRefused = 3,  // a stage refused to run on this input
};

struct RunOutput {
  nlohmann::json report;
  std::string svg;  // chamber diagram for rank-2 actions
  int exit_code = kExitOk;
};

// out_dir receives binary dumps when outputs.dumps is set; empty disables them.
RunOutput run_command(Command command, const RunConfig& config, bool force = false, const std::string& out_dir = "");

}  // namespace toralrig
