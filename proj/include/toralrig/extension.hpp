// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "toralrig/cocycle.hpp"
#include "toralrig/lattice_action.hpp"

namespace toralrig {

// Derivative of the skew product (x, y) -> (A x, beta(a, x) y) along E_i x TN.
//   | A  0 |
//   | C  D |
struct BlockDerivative {
  int n = 0;
  double A = 1.0;  // scalar restriction to E_i (d_i = 1)
  double C = 0.0;  // derivative of the fiber map along the unit vector of E_i
  double D = 1.0;  // fiber derivative
  Eigen::VectorXd x_image;
  double y_image = 0.0;
};

BlockDerivative block_derivative(const CircleCocycle& beta, const LyapunovSpectrum& spectrum, int i,
                                 const LatticePoint& a, const Eigen::VectorXd& x, double y, int n);

struct ConeParams {
  int index = 0;
  LatticePoint a;
  int l = 1;
  double gamma = 1.0;
  double epsilon = 0.0;
  double c = 1.0;
  double lambda = 0.0;       // sup |A_1|^{-1} |D_1|
  double L = 0.0;
  double sup_C = 0.0;        // sup |C_l| on the grid
  double grid_ratio = 0.0;   // worst one-step image ratio on the grid
  GridSpec grid;
};

ConeParams cone_params(const CircleCocycle& beta, const LyapunovSpectrum& spectrum, int i, const LatticePoint& a,
                       GridSpec grid);

struct ConeVerification {
  bool pass = false;
  double worst_ratio = 0.0;
  int samples = 0;
  Eigen::VectorXd witness_x;
  double witness_y = 0.0;
};

// Throws ConeEscape when a boundary vector leaves the (1 - epsilon) cone.
ConeVerification cone_contraction_verify(const ConeParams& params, const CircleCocycle& beta,
                                         const LyapunovSpectrum& spectrum, int samples, std::uint64_t seed = 3);

// Slope field on (base^d) x fiber nodes; node index = base_index * fiber + j,
// base_index mixed radix with coordinate 0 fastest.
struct SectionGrid {
  int index = 0;
  LatticePoint a;
  int l = 1;
  int dimension = 0;
  GridSpec grid;
  Eigen::VectorXd direction;  // unit vector spanning E_i
  std::vector<double> slope;
  double gamma = 1.0;
  double growth_constant = 1.0;        // C'
  double transversality_constant = 1.0;  // C''
  double residual = 0.0;
  double contraction_bound = 0.0;
  double interpolation_error = 0.0;
  int iterations = 0;
  std::vector<double> deltas;
  std::vector<double> sup_slopes;  // sup |s| after each iteration

  std::size_t base_nodes() const;
  double at_node(std::size_t base_index, int j) const { return slope[base_index * grid.fiber + j]; }
  Eigen::VectorXd node_point(std::size_t base_index) const;
  // Multilinear in x, linear in y.
  double interpolate(const Eigen::VectorXd& x, double y) const;
  double sup_abs() const;
  // Agreement tolerance against an exact section for a driving tolerance tol.
  double comparison_tolerance(double tol) const;
};

SectionGrid invariant_distribution(const CircleCocycle& beta, const LyapunovSpectrum& spectrum,
                                   const ConeParams& params, GridSpec grid, double tol, int max_iter);

struct GrowthReport {
  std::size_t checked = 0;
  double worst_lower = 0.0;  // max of C'^{-1} e^{chi} / |v'|
  double worst_upper = 0.0;  // max of |v'| / (C' e^{chi})
  double measured_constant = 1.0;
};

// Throws GrowthViolated(b..., node).
GrowthReport growth_verify(const SectionGrid& section, const CircleCocycle& beta, const LyapunovSpectrum& spectrum,
                           const std::vector<LatticePoint>& b_set, int samples, std::uint64_t seed = 5);

struct DominatedSplittingReport {
  LatticePoint a;
  int index = 0;
  double r = 0.0;
  double sup_k = 0.0;
  double sup_alpha = 0.0;
  double sup_k_alpha_r = 0.0;
  bool section_used = false;
};

// E^1 is the section when given, otherwise the flat lift of E_i; E^2 is TN.
DominatedSplittingReport dominated_rates(const CircleCocycle& beta, const LyapunovSpectrum& spectrum, int i,
                                         const LatticePoint& a, const SectionGrid* section, double r, GridSpec grid);

void save_section(const SectionGrid& section, const std::string& path);
SectionGrid load_section(const std::string& path);

}  // namespace toralrig
