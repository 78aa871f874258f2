// SPDX-License-Identifier: Apache-2.0
#include "toralrig/circle_map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "toralrig/error.hpp"

namespace toralrig {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

CircleMap::CircleMap(double shift, std::vector<std::complex<double>> coefficients)
    : shift_(shift), coef_(std::move(coefficients)) {
  while (!coef_.empty() && coef_.back() == std::complex<double>(0.0, 0.0)) coef_.pop_back();
}

void CircleMap::offset(double y, double& value, double& slope) const {
  if (coef_.empty()) {
    value = shift_;
    slope = 0.0;
    return;
  }
  double s, c;
  sincos(kTwoPi * y, &s, &c);
  const std::complex<double> z(c, s);
  std::complex<double> zn = z, acc = 0.0, dacc = 0.0;
  const std::size_t n = coef_.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> w = coef_[k] * zn;
    acc += w;
    dacc += static_cast<double>(k + 1) * w;
    zn *= z;
  }
  value = shift_ + acc.real();
  slope = -kTwoPi * dacc.imag();
}

void CircleMap::evaluate(double y, double& value, double& slope) const {
  offset(y, value, slope);
  value += y;
  slope += 1.0;
}

double CircleMap::operator()(double y) const {
  double v, s;
  evaluate(y, v, s);
  return v;
}

double CircleMap::derivative(double y) const {
  double v, s;
  evaluate(y, v, s);
  return s;
}

double CircleMap::second_derivative(double y) const {
  double s, c;
  sincos(kTwoPi * y, &s, &c);
  const std::complex<double> z(c, s);
  std::complex<double> zn = z;
  double acc = 0.0;
  for (std::size_t k = 0; k < coef_.size(); ++k) {
    double nn = kTwoPi * static_cast<double>(k + 1);
    acc -= nn * nn * (coef_[k] * zn).real();
    zn *= z;
  }
  return acc;
}

double CircleMap::inverse(double y) const {
  if (coef_.empty()) return y - shift_;
  const double amp = amplitude() * (1.0 + 1e-12) + 1e-300;
  double lo = y - shift_ - amp, hi = y - shift_ + amp;
  double z = y - shift_;
  {
    double v, s;
    offset(z, v, s);
    z = std::clamp(y - v, lo, hi);
  }
  for (int it = 0; it < 100; ++it) {
    double v, s;
    evaluate(z, v, s);
    const double r = v - y;
    if (r == 0.0) return z;
    if (r > 0.0)
      hi = std::min(hi, z);
    else
      lo = std::max(lo, z);
    double next = z - r / s;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - z) <= 2e-16 * (1.0 + std::abs(z))) return next;
    z = next;
  }
  return z;
}

double CircleMap::amplitude() const {
  double a = 0.0;
  for (const auto& c : coef_) a += std::abs(c);
  return a;
}

double CircleMap::min_derivative_bound() const {
  double b = 0.0;
  for (std::size_t k = 0; k < coef_.size(); ++k) b += kTwoPi * static_cast<double>(k + 1) * std::abs(coef_[k]);
  return 1.0 - b;
}

double CircleMap::max_derivative_bound() const { return 2.0 - min_derivative_bound(); }

double CircleMap::second_derivative_bound() const {
  double b = 0.0;
  for (std::size_t k = 0; k < coef_.size(); ++k) {
    double nn = kTwoPi * static_cast<double>(k + 1);
    b += nn * nn * std::abs(coef_[k]);
  }
  return b;
}

void CircleDiffeo::append(const CircleDiffeo& after) {
  steps_.insert(steps_.end(), after.steps_.begin(), after.steps_.end());
}

CircleDiffeo CircleDiffeo::then(const CircleDiffeo& after) const {
  CircleDiffeo out = *this;
  out.append(after);
  return out;
}

CircleDiffeo CircleDiffeo::inverse() const {
  CircleDiffeo out;
  out.steps_.reserve(steps_.size());
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) out.steps_.push_back({it->map, !it->inverse});
  return out;
}

double CircleDiffeo::operator()(double y) const {
  for (const auto& s : steps_) y = s.inverse ? s.map.inverse(y) : s.map(y);
  return y;
}

void CircleDiffeo::evaluate(double y, double& value, double& slope) const {
  slope = 1.0;
  for (const auto& s : steps_) {
    double v, d;
    if (s.inverse) {
      v = s.map.inverse(y);
      d = 1.0 / s.map.derivative(v);
    } else {
      s.map.evaluate(y, v, d);
    }
    slope *= d;
    y = v;
  }
  value = y;
}

double CircleDiffeo::derivative(double y) const {
  double v, s;
  evaluate(y, v, s);
  return s;
}

double CircleDiffeo::inverse_apply(double y) const {
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) y = it->inverse ? it->map(y) : it->map.inverse(y);
  return y;
}

void CircleDiffeo::apply_in_place(std::vector<double>& ys) const {
  for (const auto& s : steps_) {
    if (s.inverse)
      for (auto& y : ys) y = s.map.inverse(y);
    else
      for (auto& y : ys) y = s.map(y);
  }
}

double circle_difference(double a, double b) {
  double d = a - b;
  return d - std::floor(d + 0.5);
}

double c0_distance(const CircleDiffeo& f, const CircleDiffeo& g, int samples) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    double y = static_cast<double>(i) / samples;
    worst = std::max(worst, std::abs(circle_difference(f(y), g(y))));
  }
  return worst;
}

double distance_from_identity(const CircleDiffeo& f, int samples) { return distance_from_rotation(f, 0.0, samples); }

double distance_from_rotation(const CircleDiffeo& f, double t, int samples) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    double y = static_cast<double>(i) / samples;
    worst = std::max(worst, std::abs(circle_difference(f(y), y + t)));
  }
  return worst;
}

RotationNumber rotation_number(const CircleDiffeo& f, int iterations, int max_denominator) {
  RotationNumber out;
  constexpr int kGrid = 128;
  std::vector<double> ys(kGrid), cur(kGrid);
  for (int i = 0; i < kGrid; ++i) ys[i] = cur[i] = static_cast<double>(i) / kGrid;
  f.apply_in_place(cur);
  double lo = INFINITY, hi = -INFINITY, mean = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    double d = cur[i] - ys[i];
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    mean += d / kGrid;
  }
  if (hi - lo < 1e-13) {
    out.value = mean - std::floor(mean);
    if (out.value >= 1.0) out.value = 0.0;
    out.exact = true;
    out.q = 0;
    return out;
  }
  double x = 0.0;
  for (int i = 0; i < iterations; ++i) x = f(x);
  const double estimate = x / iterations;
  out.error = 1.0 / iterations;
  for (int q = 1; q <= max_denominator; ++q) {
    if (q > 1) f.apply_in_place(cur);
    double m = 0.0;
    for (int i = 0; i < kGrid; ++i) m += (cur[i] - ys[i]) / kGrid;
    const long p = std::lround(m);
    if (std::abs(static_cast<double>(p) / q - estimate) > 2.0 * out.error) continue;
    bool hit = false;
    double prev = cur[kGrid - 1] - ys[kGrid - 1] - p;
    for (int i = 0; i < kGrid && !hit; ++i) {
      double r = cur[i] - ys[i] - p;
      if (std::abs(r) < 1e-10 || (r > 0) != (prev > 0)) hit = true;
      prev = r;
    }
    if (hit) {
      double v = static_cast<double>(p) / q;
      out.value = v - std::floor(v);
      out.exact = true;
      out.p = p;
      out.q = q;
      out.error = 0.0;
      return out;
    }
  }
  out.value = estimate - std::floor(estimate);
  return out;
}

}  // namespace toralrig
