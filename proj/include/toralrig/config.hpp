// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "toralrig/circle_map.hpp"
#include "toralrig/cocycle.hpp"
#include "toralrig/integer.hpp"
#include "toralrig/lattice_action.hpp"

namespace toralrig {

enum class CocycleKind { Identity, Rotations, Constant, Coboundary, Fourier };

struct CocycleSpec {
  CocycleKind kind = CocycleKind::Identity;
  std::vector<double> angles;        // rotations, or coboundary beta0 as rotations
  std::vector<CircleMap> maps;       // constant, or coboundary beta0
  std::vector<FourierField> fields;  // fourier fields, or the single coboundary phi
  std::vector<GeneratorWord> words;  // fourier only
};

struct Tolerances {
  double tol = 1e-8;
  double safety = 0.1;
  int search_bound = 10;
  int witness_bound = 2;
  int sample_bound = 8;
  int k_max = 4;
  int ph_samples = 50;
  double norm_cap = 60.0;
  double section_tol = 1e-7;
  int section_max_iter = 200;
  int cone_samples = 1000;
  int growth_samples = 200;
  int path_samples = 50;
  int coboundary_samples = 50;
  int max_period = 6;
};

struct Grids {
  GridSpec certify{16, 64};
  GridSpec section{16, 64};
  GridSpec transfer{16, 64};
};

struct Outputs {
  std::string report = "report.json";
  std::string diagram = "chambers.svg";
  bool dumps = false;  // binary section and transfer map files
};

struct RunConfig {
  std::string source;  // file path or "<string>"
  std::vector<IntMatrix> generators;
  CocycleSpec cocycle;
  Grids grids;
  Tolerances tolerances;
  Outputs outputs;
  std::optional<LatticePoint> element;  // certify target; first chamber representative when absent
  double bunching_r = 0.0;
  std::uint64_t seed = 1;

  int dimension() const { return generators.empty() ? 0 : static_cast<int>(generators.front().rows()); }
  int rank() const { return static_cast<int>(generators.size()); }
};

// Throws Error(Config) with the offending field and line.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_string(const std::string& text, const std::string& source = "<string>");

CircleCocycle build_cocycle(const RunConfig& config, const GeneratorSet& gens);

}  // namespace toralrig
