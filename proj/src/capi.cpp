// SPDX-License-Identifier: Apache-2.0
#include "toralrig/toralrig.h"

#include <cstring>
#include <exception>
#include <optional>
#include <string>

#include "toralrig/config.hpp"
#include "toralrig/error.hpp"
#include "toralrig/holonomy.hpp"
#include "toralrig/lattice_action.hpp"
#include "toralrig/parallel.hpp"
#include "toralrig/pipeline.hpp"
#include "toralrig/weyl.hpp"

struct toralrig_config {
  toralrig::RunConfig config;
};

struct toralrig_report {
  std::string json;
  std::string svg;
  int exit_code = 0;
};

struct toralrig_action {
  toralrig::GeneratorSet gens;
  toralrig::LyapunovSpectrum spectrum;
};

namespace {

thread_local std::string last_error;

toralrig_status status_of(toralrig::ErrorKind kind) { return static_cast<toralrig_status>(static_cast<int>(kind) + 1); }

template <typename F>
toralrig_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return TORALRIG_OK;
  } catch (const toralrig::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    last_error = e.what();
    return TORALRIG_E_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return TORALRIG_E_INTERNAL;
  }
}

toralrig_status null_argument(const char* name) {
  last_error = std::string("null argument: ") + name;
  return TORALRIG_E_NULL_ARGUMENT;
}

}  // namespace

extern "C" {

const char* toralrig_version(void) { return "0.1.0"; }

const char* toralrig_status_name(toralrig_status status) {
  if (status == TORALRIG_OK) return "Ok";
  if (status == TORALRIG_E_NULL_ARGUMENT) return "NullArgument";
  if (status == TORALRIG_E_INTERNAL) return "Internal";
  const int k = static_cast<int>(status) - 1;
  if (k < 0 || k > static_cast<int>(toralrig::ErrorKind::StageRefused)) return "Unknown";
  return toralrig::error_kind_name(static_cast<toralrig::ErrorKind>(k));
}

const char* toralrig_last_error(void) { return last_error.c_str(); }

toralrig_status toralrig_set_threads(int threads) {
  if (threads < 0) {
    last_error = "thread count must be non-negative";
    return TORALRIG_E_INVALID_INPUT;
  }
  toralrig::set_thread_count(threads);
  return TORALRIG_OK;
}

toralrig_status toralrig_config_load(const char* path, toralrig_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new toralrig_config{toralrig::parse_config_file(path)}; });
}

toralrig_status toralrig_config_parse(const char* text, toralrig_config** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new toralrig_config{toralrig::parse_config_string(text)}; });
}

void toralrig_config_free(toralrig_config* config) { delete config; }

toralrig_status toralrig_config_set_seed(toralrig_config* config, uint64_t seed) {
  if (!config) return null_argument("config");
  config->config.seed = seed;
  return TORALRIG_OK;
}

const char* toralrig_config_report_name(const toralrig_config* config) {
  return config ? config->config.outputs.report.c_str() : nullptr;
}

const char* toralrig_config_diagram_name(const toralrig_config* config) {
  return config ? config->config.outputs.diagram.c_str() : nullptr;
}

toralrig_status toralrig_run(const toralrig_config* config, toralrig_command command, int force, const char* out_dir,
                             toralrig_report** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  toralrig::Command cmd;
  switch (command) {
    case TORALRIG_ANALYZE: cmd = toralrig::Command::Analyze; break;
    case TORALRIG_CERTIFY: cmd = toralrig::Command::Certify; break;
    case TORALRIG_RIGIDITY: cmd = toralrig::Command::Rigidity; break;
    default:
      last_error = "unknown command";
      return TORALRIG_E_INVALID_INPUT;
  }
  return guarded([&] {
    toralrig::RunOutput r = toralrig::run_command(cmd, config->config, force != 0, out_dir ? out_dir : "");
    *out = new toralrig_report{r.report.dump(2), std::move(r.svg), r.exit_code};
  });
}

const char* toralrig_report_json(const toralrig_report* report) { return report ? report->json.c_str() : nullptr; }

const char* toralrig_report_svg(const toralrig_report* report) {
  if (!report || report->svg.empty()) return nullptr;
  return report->svg.c_str();
}

int toralrig_report_exit_code(const toralrig_report* report) {
  return report ? report->exit_code : toralrig::kExitFailed;
}

void toralrig_report_free(toralrig_report* report) { delete report; }

toralrig_status toralrig_action_create(int dimension, int rank, const int64_t* entries, toralrig_action** out) {
  if (!entries) return null_argument("entries");
  if (!out) return null_argument("out");
  *out = nullptr;
  if (dimension <= 0 || rank <= 0) {
    last_error = "dimension and rank must be positive";
    return TORALRIG_E_INVALID_INPUT;
  }
  return guarded([&] {
    std::vector<toralrig::IntMatrix> gens;
    for (int j = 0; j < rank; ++j) {
      toralrig::IntMatrix m(dimension, dimension);
      for (int r = 0; r < dimension; ++r)
        for (int c = 0; c < dimension; ++c)
          m(r, c) = entries[(static_cast<std::size_t>(j) * dimension + r) * dimension + c];
      gens.push_back(std::move(m));
    }
    toralrig::GeneratorSet set(std::move(gens));
    toralrig::ActionReport report = toralrig::validate_action(set);
    *out = new toralrig_action{std::move(set), std::move(report.spectrum)};
  });
}

void toralrig_action_free(toralrig_action* action) { delete action; }

int toralrig_action_functional_count(const toralrig_action* action) { return action ? action->spectrum.size() : 0; }

toralrig_status toralrig_action_functional(const toralrig_action* action, int index, double* values, int* dimension) {
  if (!action) return null_argument("action");
  if (!values) return null_argument("values");
  if (index < 0 || index >= action->spectrum.size()) {
    last_error = "functional index out of range";
    return TORALRIG_E_INVALID_INPUT;
  }
  const auto& s = action->spectrum.spaces[static_cast<std::size_t>(index)];
  for (Eigen::Index i = 0; i < s.functional.size(); ++i) values[i] = s.functional(i);
  if (dimension) *dimension = s.dim();
  return TORALRIG_OK;
}

toralrig_status toralrig_action_chambers(const toralrig_action* action, int search_bound, size_t* count) {
  if (!action) return null_argument("action");
  if (!count) return null_argument("count");
  return guarded([&] { *count = toralrig::chambers(action->spectrum, search_bound).chambers.size(); });
}

toralrig_status toralrig_action_predicates(const toralrig_action* action, int search_bound, int flags[5]) {
  if (!action) return null_argument("action");
  if (!flags) return null_argument("flags");
  return guarded([&] {
    const auto p = toralrig::chambers(action->spectrum, search_bound, false).predicates;
    flags[0] = p.maximal;
    flags[1] = p.cartan;
    flags[2] = p.tns;
    flags[3] = p.full;
    flags[4] = p.resonance_free;
  });
}

toralrig_status toralrig_action_cover_index(const toralrig_action* action, char* buf, size_t size) {
  if (!action) return null_argument("action");
  if (!buf) return null_argument("buf");
  return guarded([&] {
    const std::string s = toralrig::cover_lattice(action->gens).index.str();
    if (s.size() + 1 > size) throw toralrig::Error(toralrig::ErrorKind::Overflow, "buffer too small");
    std::memcpy(buf, s.c_str(), s.size() + 1);
  });
}

}  // extern "C"
