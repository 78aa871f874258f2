// SPDX-License-Identifier: Apache-2.0
// Command-line front end over the C interface.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "toralrig/toralrig.h"

namespace {

constexpr int kExitConfig = 2;

bool write_file(const std::filesystem::path& path, const char* text) {
  std::ofstream f(path);
  f << text;
  return static_cast<bool>(f);
}

int run(toralrig_command command, const std::string& config_path, std::optional<std::uint64_t> seed,
        const std::string& out_dir, bool force) {
  toralrig_config* cfg = nullptr;
  if (toralrig_config_load(config_path.c_str(), &cfg) != TORALRIG_OK) {
    std::cerr << "toralrig: " << toralrig_last_error() << "\n";
    return kExitConfig;
  }
  if (seed) toralrig_config_set_seed(cfg, *seed);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "toralrig: cannot create " << out_dir << ": " << ec.message() << "\n";
    toralrig_config_free(cfg);
    return kExitConfig;
  }
  toralrig_report* report = nullptr;
  const toralrig_status st = toralrig_run(cfg, command, force ? 1 : 0, out_dir.c_str(), &report);
  if (st != TORALRIG_OK) {
    std::cerr << "toralrig: " << toralrig_status_name(st) << ": " << toralrig_last_error() << "\n";
    toralrig_config_free(cfg);
    return kExitConfig;
  }
  const std::filesystem::path dir(out_dir);
  int code = toralrig_report_exit_code(report);
  const auto report_path = dir / toralrig_config_report_name(cfg);
  if (!write_file(report_path, toralrig_report_json(report))) {
    std::cerr << "toralrig: cannot write " << report_path << "\n";
    code = kExitConfig;
  } else {
    std::cout << "report: " << report_path.string() << "\n";
  }
  if (const char* svg = toralrig_report_svg(report)) {
    const auto svg_path = dir / toralrig_config_diagram_name(cfg);
    if (write_file(svg_path, svg)) std::cout << "diagram: " << svg_path.string() << "\n";
    else code = kExitConfig;
  }
  std::cout << "exit: " << code << "\n";
  toralrig_report_free(report);
  toralrig_config_free(cfg);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov, Weyl chamber and cocycle rigidity toolkit for toral Z^k actions"};
  app.set_version_flag("--version", toralrig_version());
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  bool force = false;
  toralrig_command command = TORALRIG_ANALYZE;

  struct Entry {
    const char* name;
    const char* help;
    toralrig_command command;
  };
  const Entry entries[] = {
      {"analyze", "Lyapunov spectrum, Weyl chambers and predicates", TORALRIG_ANALYZE},
      {"certify", "bunching, PH membership and robustness certificates", TORALRIG_CERTIFY},
      {"rigidity", "transfer map, cover lattice, constant reduction and coboundary checks", TORALRIG_RIGIDITY},
  };
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("config", config_path, "TOML run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--out", out_dir, "output directory");
    if (e.command == TORALRIG_RIGIDITY) sub->add_flag("--force", force, "run even when certification fails");
    const toralrig_command c = e.command;
    sub->callback([&command, c] { command = c; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  return run(command, config_path, seed, out_dir, force);
}
