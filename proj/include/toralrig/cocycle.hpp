// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "toralrig/circle_map.hpp"
#include "toralrig/lattice_action.hpp"
#include "toralrig/weyl.hpp"

namespace toralrig {

// Term Re(c e^{2 pi i (m.z + n y)}).
struct FourierTerm {
  Eigen::VectorXi m;
  int n = 0;
  std::complex<double> c;
};

struct FieldBounds {
  double s1y = 0.0;   // sup |f_y|
  double s2yy = 0.0;  // sup |f_yy|
  double amplitude = 0.0;
  Eigen::VectorXd sz;   // sup |f_{z_i}|
  Eigen::VectorXd szy;  // sup |f_{z_i y}|
  double min_slope = 1.0;  // lower bound for 1 + f_y
  double max_slope = 1.0;
};

// z in T^d  ->  circle map y -> y + rotation + f(z, y).
class FourierField {
 public:
  static constexpr int kDegreeCap = 8;

  FourierField(int base_dimension, double rotation, std::vector<FourierTerm> terms, int degree_cap = kDegreeCap);
  static FourierField constant(int base_dimension, const CircleMap& map);

  int base_dimension() const { return dim_; }
  double rotation() const { return rotation_; }
  const std::vector<FourierTerm>& terms() const { return terms_; }
  bool x_independent() const;
  const FieldBounds& bounds() const { return bounds_; }

  // z is read as dim_ coordinates; only its fractional part matters.
  CircleMap at(const long double* z) const;
  // Derivative of the offset along dz, as a map whose offset() gives (value, d/dy value).
  CircleMap directional(const long double* z, const double* dz) const;

 private:
  int dim_;
  double rotation_;
  std::vector<FourierTerm> terms_;
  int max_n_ = 0;
  FieldBounds bounds_;
};

// Factor F(base * x) of a generator word; inverse factors use F(base * x)^{-1}.
struct WordFactor {
  int field = 0;
  IntMatrix base;
  bool inverse = false;
};
using GeneratorWord = std::vector<WordFactor>;

struct PathStep {
  CircleMap map;
  CircleMap dmap;  // x-directional derivative data; empty unless requested
  bool inverse = false;
};

struct Jet {
  double y = 0.0;
  double dy = 1.0;  // d/dy
  double dx = 0.0;  // directional derivative in the base
};

Jet propagate(const std::vector<PathStep>& path, Jet jet);

class CircleCocycle {
 public:
  CircleCocycle(GeneratorSet action, std::vector<FourierField> fields, std::vector<GeneratorWord> words,
                double compatibility_tol = 1e-10, std::uint64_t seed = 7);

  const GeneratorSet& action() const { return action_; }
  const std::vector<FourierField>& fields() const { return fields_; }
  const std::vector<GeneratorWord>& words() const { return positive_; }
  double compatibility_defect() const { return compatibility_defect_; }
  // True when every field is x-independent.
  bool constant() const;

  CircleDiffeo evaluate(const LatticePoint& a, const Eigen::VectorXd& x) const;
  // Generator order given explicitly; each entry is (generator, +1/-1).
  CircleDiffeo evaluate_word(const std::vector<std::pair<int, int>>& word, const Eigen::VectorXd& x) const;
  std::vector<PathStep> path(const LatticePoint& a, const Eigen::VectorXd& x,
                             const Eigen::VectorXd* direction = nullptr) const;

  // Chain-rule bounds over all (x, y) for the word of a.
  struct ChainBounds {
    double d1max = 1.0, d1min = 1.0, d2 = 0.0;
    Eigen::VectorXd x, xy;
  };
  ChainBounds chain_bounds(const LatticePoint& a) const;

 private:
  std::vector<PathStep> path_word(const std::vector<std::pair<int, int>>& word, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd* direction) const;

  GeneratorSet action_;
  std::vector<FourierField> fields_;
  std::vector<GeneratorWord> positive_;
  std::vector<GeneratorWord> negative_;
  double compatibility_defect_ = 0.0;
};

// Fixtures and constructions.
CircleCocycle identity_cocycle(const GeneratorSet& gens);
CircleCocycle constant_cocycle(const GeneratorSet& gens, const std::vector<CircleMap>& maps);
CircleCocycle constant_rotations(const GeneratorSet& gens, const std::vector<double>& angles);
// beta(e_j, x) = phi(A_j x) o beta0_j o phi(x)^{-1}
CircleCocycle coboundary_construct(const FourierField& phi, const std::vector<CircleMap>& beta0,
                                   const GeneratorSet& gens);
// y -> y + eps sin(2 pi y) / (2 pi)
CircleMap sine_map(double eps);
// phi(x): y -> y + eps sin(2 pi y) sin(2 pi x_coord) / (2 pi)
FourierField sine_product_field(int base_dimension, double eps, int coordinate = 0);

struct GridSpec {
  int base = 16;
  int fiber = 64;
};

struct DerivativeBounds {
  double sup_derivative = 1.0;          // inflated
  double sup_inverse_derivative = 1.0;  // inflated
  double grid_sup_derivative = 1.0;     // raw maxima over grid nodes
  double grid_sup_inverse_derivative = 1.0;
  double margin = 0.0;                  // additive margin on the derivative
  double chain_sup_derivative = 1.0;    // coefficient-only chain bound
  double chain_sup_inverse_derivative = 1.0;
  GridSpec grid;
  // Per base node: (max_y, min_y) of the fiber derivative.
  std::vector<double> node_max, node_min;
};

DerivativeBounds derivative_bounds(const CircleCocycle& beta, const LatticePoint& a, GridSpec grid);

struct BunchingCertificate {
  LatticePoint a;
  int k = 1;
  double r = 0.0;  // infinity allowed
  double margin = 0.0;  // max of the suprema in both bunching inequalities
  double sup_first = 0.0;
  double sup_second = 0.0;
  double unstable_inverse_norm = 1.0;
  double sup_derivative = 1.0;
  double sup_inverse_derivative = 1.0;
  std::string method;  // "grid" or "submultiplicative"
  GridSpec grid;
};

BunchingCertificate bunching_check(const CircleCocycle& beta, const LyapunovSpectrum& spectrum, const LatticePoint& a,
                                   double r, int k_max, GridSpec grid);

struct ChamberPH {
  int chamber = -1;
  LatticePoint representative;
  std::optional<BunchingCertificate> certificate;
  std::string failure;
};

struct PHProbe {
  std::vector<ChamberPH> chambers;
  bool all_certified = false;
};

PHProbe ph_probe(const CircleCocycle& beta, const LyapunovSpectrum& spectrum, const WeylChamberDecomposition& dec,
                 GridSpec grid, int k_max);

struct PHSample {
  LatticePoint b;
  bool forced = false;
  double margin = 0.0;
  int k = 0;
};

struct PHRobustnessCertificate {
  LatticePoint a;
  int k0 = 1;
  double lambda = 0.0;
  double D1 = 0.0;
  double D2 = 0.0;
  double epsilon = 0.0;
  double safety = 0.1;
  double cutoff_N = 0.0;
  long n0 = 0;
  int chi0 = -1;
  double C0 = 1.0;
  double C1 = 1.0;
  std::vector<PHSample> samples;
};

PHRobustnessCertificate ph_robustness(const CircleCocycle& beta, const LyapunovSpectrum& spectrum,
                                      const LatticePoint& a, const BunchingCertificate& cert, int sample_count,
                                      double norm_cap = 60.0, double safety = 0.1, std::uint64_t seed = 11,
                                      GridSpec grid = {}, int k_max = 4);

struct FixedPointWitness {
  int generator = 0;
  bool regular = true;
  std::size_t fixed_points = 0;
  std::optional<Eigen::VectorXd> witness;
  double best_distance = 0.0;
};

struct FixedPointReport {
  bool trivial = false;
  std::vector<FixedPointWitness> generators;
};

FixedPointReport fixed_point_trivial_check(const CircleCocycle& beta, double tol = 1e-9,
                                           std::size_t max_points = 200000);

}  // namespace toralrig
