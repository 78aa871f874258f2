// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "toralrig/circle_map.hpp"
#include "toralrig/cocycle.hpp"
#include "toralrig/integer.hpp"
#include "toralrig/lattice_action.hpp"
#include "toralrig/weyl.hpp"

namespace toralrig {

// Lattice spanned by the columns of all A_j - I.
struct CoverLattice {
  IntMatrix basis;  // lower-triangular columns
  BigInt index = 1;
  std::vector<BigInt> elementary_divisors;
  int rank = 0;
};

CoverLattice cover_lattice(const GeneratorSet& gens);

struct HolonomyResult {
  CircleDiffeo map;
  int steps = 0;
  std::vector<double> deltas;  // sup_y |H_{n+1} - H_n| for n = 1, 2, ...
  double rho_predicted = 0.0;
  double error_bound = 0.0;
};

// Limit of beta(na, A^{-n} q) o beta(na, A^{-n} p)^{-1}; q - p must lie in E^u_a.
HolonomyResult unstable_holonomy(const CircleCocycle& beta, const LyapunovSpectrum& spectrum, const LatticePoint& a,
                                 const Eigen::VectorXd& p, const Eigen::VectorXd& q, double tol, int n_max);

// Fitted geometric rate of a delta sequence (median of pairwise log slopes).
double fitted_rate(const std::vector<double>& deltas, double floor = 1e-13);

// One leg direction per coarse class.
struct LegPlan {
  int coarse_class = 0;
  LatticePoint a;           // element whose unstable space is the class
  int bunching_k = 1;
  Eigen::MatrixXd basis;    // orthonormal basis of the class
  Eigen::MatrixXd inverse_restriction;
  IntMatrix inverse;        // exact inverse of the action of a
  double rho = 0.0;
  int steps = 1;            // holonomy truncation
};

struct TransferPlan {
  std::vector<LegPlan> legs;
  Eigen::MatrixXd coordinates;  // inverse of [basis_1 ... basis_m]
  double tol = 1e-8;
};

// Requires a full action and bunching certificates for every class element.
TransferPlan plan_transfer(const CircleCocycle& beta, const LyapunovSpectrum& spectrum,
                           const WeylChamberDecomposition& dec, double tol, GridSpec grid = {}, int k_max = 4);

// h(x) applied to ys in place; descending reverses the class order.
void apply_transfer(const CircleCocycle& beta, const TransferPlan& plan, const Eigen::VectorXd& x,
                    std::vector<double>& ys, bool descending = false);

struct TransferMap {
  IntMatrix lattice;  // columns span the period lattice
  int base = 16;
  int fiber = 64;
  int dimension = 0;
  std::vector<double> displacement;  // h(x)(y_j) - y_j, node-major
  double path_defect = 0.0;          // ascending vs descending, sampled nodes
  double truncation_defect = 0.0;    // one extra holonomy step, sampled nodes
  std::size_t nodes() const;
  Eigen::VectorXd node_point(std::size_t index) const;
  CircleMap node_map(std::size_t index) const;
  // 6-point periodic Lagrange interpolation in lattice coordinates.
  CircleMap map_at(const Eigen::VectorXd& x) const;
};

TransferMap transfer_map(const CircleCocycle& beta, const TransferPlan& plan, const CoverLattice& cover, GridSpec grid,
                         int path_samples = 50, std::uint64_t seed = 13);

void save_transfer(const TransferMap& h, const std::string& path);
TransferMap load_transfer(const std::string& path);

struct ConstantReduction {
  std::vector<CircleDiffeo> beta0;  // one per generator
  std::vector<RotationNumber> rotation;
  double defect = 0.0;
};

ConstantReduction reduce_to_constant(const CircleCocycle& beta, const TransferMap& h, int samples,
                                     std::uint64_t seed = 17);

struct CoboundaryReport {
  double periodicity_defect = 0.0;
  double identity_residual = 0.0;
  std::size_t samples = 0;
};

// Throws NotFixedPointTrivial with the failing generator.
CoboundaryReport coboundary_verify(const CircleCocycle& beta, const TransferPlan& plan, const TransferMap& h,
                                   const CoverLattice& cover, int samples, std::uint64_t seed = 19);

struct ObstructionEntry {
  int period = 0;
  Eigen::VectorXd point;
  double rotation = 0.0;
  double distance_from_zero = 0.0;
};

struct ObstructionRow {
  int period = 0;
  std::size_t points = 0;  // number of x with A^n x = x
  double max_distance_from_zero = 0.0;
  std::vector<ObstructionEntry> entries;
};

std::vector<ObstructionRow> periodic_obstruction(const CircleCocycle& beta, const LatticePoint& a, int max_period,
                                                 std::size_t max_points = 20000);

}  // namespace toralrig
