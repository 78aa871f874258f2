// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace toralrig {

// Lift y -> y + shift + sum_n Re(coef[n-1] e^{2 pi i n y}), n >= 1.
class CircleMap {
 public:
  CircleMap() = default;
  CircleMap(double shift, std::vector<std::complex<double>> coefficients);

  static CircleMap rotation(double t) { return CircleMap(t, {}); }

  double shift() const { return shift_; }
  const std::vector<std::complex<double>>& coefficients() const { return coef_; }
  bool is_rotation() const { return coef_.empty(); }

  double operator()(double y) const;
  double derivative(double y) const;
  double second_derivative(double y) const;
  void evaluate(double y, double& value, double& slope) const;
  double inverse(double y) const;
  // lift(y) - y and its derivative in y.
  void offset(double y, double& value, double& slope) const;

  // Coefficient bounds on 1 + f' and |f''|.
  double min_derivative_bound() const;
  double max_derivative_bound() const;
  double second_derivative_bound() const;
  double amplitude() const;  // sup |f|

 private:
  double shift_ = 0.0;
  std::vector<std::complex<double>> coef_;
};

// Composition of circle maps and their inverses, applied in sequence order.
class CircleDiffeo {
 public:
  struct Step {
    CircleMap map;
    bool inverse = false;
  };

  CircleDiffeo() = default;
  explicit CircleDiffeo(CircleMap map) { steps_.push_back({std::move(map), false}); }

  static CircleDiffeo identity() { return {}; }
  static CircleDiffeo rotation(double t) { return CircleDiffeo(CircleMap::rotation(t)); }

  // Appends a step applied after the existing ones.
  void append(const CircleMap& map, bool inverse = false) { steps_.push_back({map, inverse}); }
  void append(const CircleDiffeo& after);
  // after o this
  CircleDiffeo then(const CircleDiffeo& after) const;
  CircleDiffeo inverse() const;

  double operator()(double y) const;
  double derivative(double y) const;
  void evaluate(double y, double& value, double& slope) const;
  double inverse_apply(double y) const;
  void apply_in_place(std::vector<double>& ys) const;

  const std::vector<Step>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }

 private:
  std::vector<Step> steps_;
};

// Signed representative of a - b in [-1/2, 1/2).
double circle_difference(double a, double b);

// Sup over `samples` equispaced y of the circle distance between f(y) and g(y).
double c0_distance(const CircleDiffeo& f, const CircleDiffeo& g, int samples = 256);
double distance_from_identity(const CircleDiffeo& f, int samples = 256);
double distance_from_rotation(const CircleDiffeo& f, double t, int samples = 256);

struct RotationNumber {
  double value = 0.0;  // in [0, 1)
  bool exact = false;  // rational p/q confirmed by a periodic orbit
  long p = 0;
  long q = 1;  // 0 marks a rigid rotation
  double error = 0.0;  // bound on |value - true rotation number| when not exact
};

RotationNumber rotation_number(const CircleDiffeo& f, int iterations = 4000, int max_denominator = 64);

}  // namespace toralrig
