// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "toralrig/integer.hpp"

namespace toralrig {

using LatticePoint = Eigen::VectorXi;

// Commuting integer matrices A_1..A_k acting on T^d.
class GeneratorSet {
 public:
  explicit GeneratorSet(std::vector<IntMatrix> generators);

  int dimension() const { return dimension_; }
  int rank() const { return static_cast<int>(generators_.size()); }
  const IntMatrix& generator(int j) const { return generators_[j]; }
  const std::vector<IntMatrix>& generators() const { return generators_; }

  // Exact inverse of A_j; throws NotUnimodular when |det A_j| != 1.
  const IntMatrix& inverse(int j) const;
  bool unimodular() const { return unimodular_; }

  // Exact product of A_j^{a_j}.
  IntMatrix element(const LatticePoint& a) const;
  // Acts on a point of R^d (no reduction mod 1).
  Eigen::VectorXd apply(const LatticePoint& a, const Eigen::VectorXd& x) const;

 private:
  int dimension_ = 0;
  std::vector<IntMatrix> generators_;
  std::vector<IntMatrix> inverses_;
  bool unimodular_ = false;
};

struct LyapunovSpace {
  Eigen::VectorXd functional;       // chi_i in R^k
  Eigen::MatrixXd basis;            // d x d_i, orthonormal columns
  std::vector<Eigen::MatrixXd> restrictions;  // basis^T A_j basis, one per generator
  double condition = 1.0;           // condition number of the complex eigenbasis of E_i
  int dim() const { return static_cast<int>(basis.cols()); }
  double value(const LatticePoint& a) const { return functional.dot(a.cast<double>()); }
};

struct LyapunovSpectrum {
  int dimension = 0;
  int rank = 0;
  std::vector<LyapunovSpace> spaces;
  double growth_constant = 1.0;
  double deviation_exponent = 0.0;

  int size() const { return static_cast<int>(spaces.size()); }
  // Functionals only; dims default to 1. Used for synthetic arrangements.
  static LyapunovSpectrum from_functionals(const std::vector<Eigen::VectorXd>& functionals,
                                           const std::vector<int>& dims = {});
  // Sum of d_i chi_i.
  Eigen::VectorXd weighted_sum() const;
  // Matrix whose columns are all Lyapunov bases in order.
  Eigen::MatrixXd full_basis() const;
  // Orthonormal basis of the sum of E_i with chi_i(a) > 0.
  Eigen::MatrixXd unstable_basis(const LatticePoint& a) const;
  double min_positive_exponent(const LatticePoint& a) const;
  // Norm of Da^{-1} on E^u_a in the flat metric making the E_i orthogonal and the
  // action conformal on each E_i: exp(-min positive chi_i(a)).
  double adapted_unstable_inverse_norm(const LatticePoint& a) const;
};

struct ActionReport {
  bool commuting = false;
  bool unimodular = false;
  std::vector<LatticePoint> anosov_witnesses;
  LyapunovSpectrum spectrum;
};

struct GrowthConstants {
  double C = 1.0;
  double L = 0.0;
  std::size_t samples = 0;
  double worst_lower = 0.0;  // max over samples of C^{-1} e^{chi} / |Dv|, must stay < 1
  double worst_upper = 0.0;  // max over samples of |Dv| / (C ||a||^L e^{chi}), must stay < 1
};

// True when no eigenvalue of m lies within tol of the unit circle.
bool is_hyperbolic(const IntMatrix& m, double tol = 1e-9);

ActionReport validate_action(const GeneratorSet& gens, int witness_bound = 2);

LyapunovSpectrum lyapunov_spectrum(const GeneratorSet& gens);

GrowthConstants growth_constants(LyapunovSpectrum& spectrum, const GeneratorSet& gens, int sample_bound,
                                 std::uint64_t seed = 1, int vectors_per_space = 100);

// Operator norm of prod A_j^{a_j} restricted to span(subspace), or of its inverse.
double derivative_norm(const GeneratorSet& gens, const LatticePoint& a, const Eigen::MatrixXd& subspace,
                       bool inverted);

// Restricted product R_a = prod R_j^{a_j} for a Lyapunov space.
Eigen::MatrixXd restricted_element(const LyapunovSpace& space, const LatticePoint& a);

// All lattice points with sup-norm <= bound, ordered by sup-norm then lexicographically.
std::vector<LatticePoint> lattice_ball(int rank, int bound);
int sup_norm(const LatticePoint& a);

}  // namespace toralrig
