// SPDX-License-Identifier: Apache-2.0
#include "toralrig/extension.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>

#include "toralrig/error.hpp"
#include "toralrig/parallel.hpp"

namespace toralrig {

namespace {

const LyapunovSpace& line_space(const LyapunovSpectrum& spectrum, int i) {
  if (i < 0 || i >= spectrum.size()) throw Error(ErrorKind::InvalidInput, "Lyapunov index out of range", {i});
  const LyapunovSpace& s = spectrum.spaces[i];
  if (s.dim() != 1)
    throw Error(ErrorKind::InvalidInput, "sections are implemented for one-dimensional Lyapunov spaces only", {i});
  return s;
}

double scalar_restriction(const LyapunovSpace& s, const LatticePoint& a) { return restricted_element(s, a)(0, 0); }

std::size_t node_count(int d, int base) {
  std::size_t n = 1;
  for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(base);
  return n;
}

Eigen::VectorXd grid_point(int d, int base, std::size_t idx) {
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) {
    x(i) = static_cast<double>(idx % base) / base;
    idx /= base;
  }
  return x;
}

std::vector<long long> payload_of(const LatticePoint& a, std::initializer_list<long long> extra = {}) {
  std::vector<long long> p(a.data(), a.data() + a.size());
  p.insert(p.end(), extra.begin(), extra.end());
  return p;
}

double wrap01(double y) { return y - std::floor(y); }

}  // namespace

BlockDerivative block_derivative(const CircleCocycle& beta, const LyapunovSpectrum& spectrum, int i,
                                 const LatticePoint& a, const Eigen::VectorXd& x, double y, int n) {
  const LyapunovSpace& s = line_space(spectrum, i);
  BlockDerivative out;
  out.n = n;
  const LatticePoint b = a * n;
  out.A = scalar_restriction(s, b);
  const Eigen::VectorXd e = s.basis.col(0);
  Jet jet;
  jet.y = y;
  jet = propagate(beta.path(b, x, &e), jet);
  out.C = jet.dx;
  out.D = jet.dy;
  out.y_image = jet.y;
  out.x_image = beta.action().apply(b, x).unaryExpr([](double v) { return v - std::floor(v); });
  return out;
}

ConeParams cone_params(const CircleCocycle& beta, const LyapunovSpectrum& spectrum, int i, const LatticePoint& a,
                       GridSpec grid) {
  const LyapunovSpace& s = line_space(spectrum, i);
  const int d = beta.action().dimension();
  ConeParams p;
  p.index = i;
  p.a = a;
  p.grid = grid;
  const double A = std::abs(scalar_restriction(s, a));
  const auto db = derivative_bounds(beta, a, grid);
  p.lambda = db.sup_derivative / A;
  if (!(p.lambda < 1.0))
    throw Error(ErrorKind::NotDominated, "fiber derivative is not dominated by the expansion along E_" +
                                             std::to_string(i), payload_of(a, {i}));
  // c = 1 and L = 0 for semisimple input, so l = 1 already gives c^{-1} - lambda^l c l^L > 0.
  p.l = 1;
  const double room = 1.0 - std::pow(p.lambda, p.l);
  const Eigen::VectorXd e = s.basis.col(0);
  const bool flat = beta.constant();
  const std::size_t nodes = flat ? 1 : node_count(d, grid.base);
  std::vector<double> cmax(nodes, 0.0), dmax(nodes, 0.0);
  std::vector<std::vector<std::pair<double, double>>> samples(nodes);
  parallel_for(nodes, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t idx = lo; idx < hi; ++idx) {
      const Eigen::VectorXd x = grid_point(d, grid.base, idx);
      const auto steps = beta.path(a * p.l, x, &e);
      auto& row = samples[idx];
      row.reserve(grid.fiber);
      for (int j = 0; j < grid.fiber; ++j) {
        Jet jet;
        jet.y = static_cast<double>(j) / grid.fiber;
        jet = propagate(steps, jet);
        row.emplace_back(std::abs(jet.dx), jet.dy);
        cmax[idx] = std::max(cmax[idx], std::abs(jet.dx));
      }
    }
  });
  p.sup_C = *std::max_element(cmax.begin(), cmax.end());
  p.gamma = p.sup_C > 1e-14 ? 2.0 * p.sup_C / room : 1.0;
  const double Al = std::abs(scalar_restriction(s, a * p.l));
  double worst = 0.0;
  for (const auto& row : samples)
    for (const auto& [c, dd] : row) worst = std::max(worst, (c + dd * p.gamma) / (p.gamma * Al));
  p.grid_ratio = worst;
  if (!(worst < 1.0))
    throw Error(ErrorKind::NotDominated, "cone image not contained on the grid", payload_of(a, {i}));
  p.epsilon = 0.5 * (1.0 - worst);
  return p;
}

ConeVerification cone_contraction_verify(const ConeParams& params, const CircleCocycle& beta,
                                         const LyapunovSpectrum& spectrum, int samples, std::uint64_t seed) {
  const LyapunovSpace& s = line_space(spectrum, params.index);
  const int d = beta.action().dimension();
  const LatticePoint b = params.a * params.l;
  const double A = std::abs(scalar_restriction(s, b));
  const Eigen::VectorXd e = s.basis.col(0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ConeVerification out;
  out.samples = samples;
  for (int t = 0; t < samples; ++t) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x(i) = u(rng);
    const double y = u(rng);
    const double sign = (t % 2 == 0) ? 1.0 : -1.0;
    Jet jet;
    jet.y = y;
    jet = propagate(beta.path(b, x, &e), jet);
    const double ratio = std::abs(jet.dx + jet.dy * sign * params.gamma) / (params.gamma * A);
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.witness_x = x;
      out.witness_y = y;
    }
  }
  out.pass = out.worst_ratio <= 1.0 - params.epsilon;
  if (!out.pass)
    throw Error(ErrorKind::ConeEscape,
                "boundary vector escapes the contracted cone (ratio " + std::to_string(out.worst_ratio) + ")",
                payload_of(params.a, {params.index}));
  return out;
}

std::size_t SectionGrid::base_nodes() const { return node_count(dimension, grid.base); }

Eigen::VectorXd SectionGrid::node_point(std::size_t base_index) const {
  return grid_point(dimension, grid.base, base_index);
}

double SectionGrid::interpolate(const Eigen::VectorXd& x, double y) const {
  const int d = dimension, n = grid.base, f = grid.fiber;
  std::vector<int> lo(d);
  std::vector<double> w(d);
  for (int i = 0; i < d; ++i) {
    const double t = wrap01(x(i)) * n;
    const double fl = std::floor(t);
    lo[i] = static_cast<int>(fl) % n;
    w[i] = t - fl;
  }
  const double ty = wrap01(y) * f;
  const double fy = std::floor(ty);
  const int j0 = static_cast<int>(fy) % f, j1 = (j0 + 1) % f;
  const double wy = ty - fy;
  double acc = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    std::size_t idx = 0, stride = 1;
    double weight = 1.0;
    for (int i = 0; i < d; ++i) {
      const bool up = (corner >> i) & 1;
      idx += stride * static_cast<std::size_t>(up ? (lo[i] + 1) % n : lo[i]);
      weight *= up ? w[i] : 1.0 - w[i];
      stride *= n;
    }
    if (weight == 0.0) continue;
    acc += weight * ((1.0 - wy) * at_node(idx, j0) + wy * at_node(idx, j1));
  }
  return acc;
}

double SectionGrid::sup_abs() const {
  double m = 0.0;
  for (double v : slope) m = std::max(m, std::abs(v));
  return m;
}

double SectionGrid::comparison_tolerance(double tol) const {
  return 10.0 * tol + interpolation_error / (1.0 - contraction_bound);
}

SectionGrid invariant_distribution(const CircleCocycle& beta, const LyapunovSpectrum& spectrum,
                                   const ConeParams& params, GridSpec grid, double tol, int max_iter) {
  const LyapunovSpace& sp = line_space(spectrum, params.index);
  const GeneratorSet& gens = beta.action();
  const int d = gens.dimension(), F = grid.fiber, n = grid.base;
  if (n < 1 || F < 2) throw Error(ErrorKind::InvalidInput, "section grid too small");
  const LatticePoint b = params.a * params.l;
  const double A = scalar_restriction(sp, b);
  const Eigen::VectorXd e = sp.basis.col(0);
  const IntMatrix back = gens.element(-b);

  SectionGrid out;
  out.index = params.index;
  out.a = params.a;
  out.l = params.l;
  out.dimension = d;
  out.grid = grid;
  out.direction = e;
  out.gamma = params.gamma;
  out.contraction_bound = std::pow(params.lambda, params.l);

  const std::size_t NB = node_count(d, n), N = NB * static_cast<std::size_t>(F);
  // The inverse action maps the grid (1/n)Z^d to itself, so only y needs interpolation.
  std::vector<std::size_t> pre(NB);
  std::vector<int> j0(N);
  std::vector<double> wy(N), cq(N), dq(N);
  parallel_for(NB, [&](std::size_t lo, std::size_t hi) {
    std::vector<long long> c(d), img(d);
    for (std::size_t q = lo; q < hi; ++q) {
      std::size_t r = q;
      for (int i = 0; i < d; ++i) {
        c[i] = static_cast<long long>(r % n);
        r /= n;
      }
      std::size_t p = 0, stride = 1;
      for (int i = 0; i < d; ++i) {
        __int128 acc = 0;
        for (int k = 0; k < d; ++k) acc += static_cast<__int128>(back(i, k)) * c[k];
        long long m = static_cast<long long>(acc % n);
        if (m < 0) m += n;
        p += stride * static_cast<std::size_t>(m);
        stride *= n;
      }
      pre[q] = p;
      const Eigen::VectorXd xp = grid_point(d, n, p);
      const auto steps = beta.path(b, xp, &e);
      for (int j = 0; j < F; ++j) {
        double y = static_cast<double>(j) / F;
        for (auto it = steps.rbegin(); it != steps.rend(); ++it) y = it->inverse ? it->map(y) : it->map.inverse(y);
        Jet jet;
        jet.y = y;
        jet = propagate(steps, jet);
        const std::size_t k = q * F + j;
        cq[k] = jet.dx / A;
        dq[k] = jet.dy / A;
        const double t = wrap01(y) * F;
        const double fl = std::floor(t);
        j0[k] = static_cast<int>(fl) % F;
        wy[k] = t - fl;
      }
    }
  });

  std::vector<double> s(N, 0.0), next(N, 0.0);
  auto transform = [&](const std::vector<double>& src, std::vector<double>& dst) {
    double delta = 0.0;
    std::mutex m;
    parallel_for(NB, [&](std::size_t lo, std::size_t hi) {
      double local = 0.0;
      for (std::size_t q = lo; q < hi; ++q) {
        const std::size_t pb = pre[q] * F;
        for (int j = 0; j < F; ++j) {
          const std::size_t k = q * F + j;
          const int a0 = j0[k], a1 = a0 + 1 == F ? 0 : a0 + 1;
          const double v = cq[k] + dq[k] * ((1.0 - wy[k]) * src[pb + a0] + wy[k] * src[pb + a1]);
          dst[k] = v;
          local = std::max(local, std::abs(v - src[k]));
        }
      }
      std::lock_guard<std::mutex> lock(m);
      delta = std::max(delta, local);
    });
    return delta;
  };

  bool converged = false;
  double delta = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    delta = transform(s, next);
    s.swap(next);
    out.deltas.push_back(delta);
    double sup = 0.0;
    for (double v : s) sup = std::max(sup, std::abs(v));
    out.sup_slopes.push_back(sup);
    out.iterations = it;
    if (delta < tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw Error(ErrorKind::NoConvergence,
                "section iteration did not converge in " + std::to_string(max_iter) +
                    " iterations (last delta " + std::to_string(delta) + ")",
                {max_iter});
  out.residual = transform(s, next);
  out.slope = std::move(s);

  double second = 0.0;
  for (std::size_t q = 0; q < NB; ++q)
    for (int j = 0; j < F; ++j) {
      const double a0 = out.slope[q * F + (j + F - 1) % F], a1 = out.slope[q * F + j],
                   a2 = out.slope[q * F + (j + 1) % F];
      second = std::max(second, std::abs(a0 - 2.0 * a1 + a2));
    }
  out.interpolation_error = second / 8.0;
  const double S = out.sup_abs();
  out.growth_constant = std::sqrt(1.0 + (1.01 * S) * (1.01 * S)) * (1.0 + 1e-9);
  out.transversality_constant = out.growth_constant;
  return out;
}

GrowthReport growth_verify(const SectionGrid& section, const CircleCocycle& beta, const LyapunovSpectrum& spectrum,
                           const std::vector<LatticePoint>& b_set, int samples, std::uint64_t seed) {
  const LyapunovSpace& sp = line_space(spectrum, section.index);
  const Eigen::VectorXd e = sp.basis.col(0);
  const std::size_t NB = section.base_nodes();
  const int F = section.grid.fiber;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_base(0, NB - 1);
  std::uniform_int_distribution<int> pick_fiber(0, F - 1);
  GrowthReport out;
  out.measured_constant = 1.0;
  const double Cp = section.growth_constant;
  for (const auto& b : b_set) {
    const double growth = std::exp(sp.value(b));
    const double A = scalar_restriction(sp, b);
    for (int t = 0; t < samples; ++t) {
      const std::size_t q = pick_base(rng);
      const int j = pick_fiber(rng);
      const Eigen::VectorXd x = section.node_point(q);
      const double s = section.at_node(q, j);
      Jet jet;
      jet.y = static_cast<double>(j) / F;
      jet = propagate(beta.path(b, x, &e), jet);
      const double image = std::hypot(A, jet.dx + jet.dy * s) / std::hypot(1.0, s);
      const double lower = growth / (Cp * image), upper = image / (Cp * growth);
      out.worst_lower = std::max(out.worst_lower, lower);
      out.worst_upper = std::max(out.worst_upper, upper);
      out.measured_constant = std::max({out.measured_constant, image / growth, growth / image});
      ++out.checked;
      if (!(lower < 1.0 && upper < 1.0))
        throw Error(ErrorKind::GrowthViolated, "growth bound violated along the invariant section",
                    payload_of(b, {static_cast<long long>(q * F + j)}));
    }
  }
  return out;
}

DominatedSplittingReport dominated_rates(const CircleCocycle& beta, const LyapunovSpectrum& spectrum, int i,
                                         const LatticePoint& a, const SectionGrid* section, double r, GridSpec grid) {
  const LyapunovSpace& sp = line_space(spectrum, i);
  const int d = beta.action().dimension();
  if (section) grid = section->grid;
  const Eigen::VectorXd e = sp.basis.col(0);
  const double A = scalar_restriction(sp, a);
  const double margin = derivative_bounds(beta, a, grid).margin;
  DominatedSplittingReport out;
  out.a = a;
  out.index = i;
  out.r = r;
  out.section_used = section != nullptr;
  const bool flat = beta.constant() && !section;
  const std::size_t NB = flat ? 1 : node_count(d, grid.base);
  std::vector<double> k_part(NB, 0.0), a_part(NB, 0.0), ka_part(NB, 0.0);
  parallel_for(NB, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t q = lo; q < hi; ++q) {
      const Eigen::VectorXd x = grid_point(d, grid.base, q);
      const auto steps = beta.path(a, x, &e);
      for (int j = 0; j < grid.fiber; ++j) {
        Jet jet;
        jet.y = static_cast<double>(j) / grid.fiber;
        jet = propagate(steps, jet);
        const double s = section ? section->at_node(q, j) : 0.0;
        const double e1 = std::hypot(A, jet.dx + jet.dy * s) / std::hypot(1.0, s);
        const double hi_d = jet.dy + margin;
        const double lo_d = jet.dy - margin;
        const double kx = hi_d / e1;
        const double ax = lo_d > 0.0 ? 1.0 / lo_d : std::numeric_limits<double>::infinity();
        k_part[q] = std::max(k_part[q], kx);
        a_part[q] = std::max(a_part[q], ax);
        ka_part[q] = std::max(ka_part[q], r == 0.0 ? kx : kx * std::pow(ax, r));
      }
    }
  });
  out.sup_k = *std::max_element(k_part.begin(), k_part.end());
  out.sup_alpha = *std::max_element(a_part.begin(), a_part.end());
  out.sup_k_alpha_r = *std::max_element(ka_part.begin(), ka_part.end());
  return out;
}

namespace {

constexpr char kSectionMagic[8] = {'T', 'R', 'S', 'E', 'C', 'T', '0', '1'};

template <typename T>
void put(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& f) {
  T v{};
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!f) throw Error(ErrorKind::Io, "truncated section dump");
  return v;
}

void put_doubles(std::ofstream& f, const std::vector<double>& v) {
  put<std::uint64_t>(f, v.size());
  f.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> get_doubles(std::ifstream& f, std::uint64_t limit) {
  const auto n = get<std::uint64_t>(f);
  if (n > limit) throw Error(ErrorKind::Io, "section dump array too large");
  std::vector<double> v(n);
  f.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!f) throw Error(ErrorKind::Io, "truncated section dump");
  return v;
}

}  // namespace

void save_section(const SectionGrid& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path);
  f.write(kSectionMagic, sizeof(kSectionMagic));
  put<std::int32_t>(f, s.index);
  put<std::int32_t>(f, s.l);
  put<std::int32_t>(f, s.dimension);
  put<std::int32_t>(f, s.grid.base);
  put<std::int32_t>(f, s.grid.fiber);
  put<std::int32_t>(f, static_cast<std::int32_t>(s.a.size()));
  for (Eigen::Index i = 0; i < s.a.size(); ++i) put<std::int32_t>(f, s.a(i));
  for (Eigen::Index i = 0; i < s.direction.size(); ++i) put<double>(f, s.direction(i));
  put<double>(f, s.gamma);
  put<double>(f, s.growth_constant);
  put<double>(f, s.transversality_constant);
  put<double>(f, s.residual);
  put<double>(f, s.contraction_bound);
  put<double>(f, s.interpolation_error);
  put<std::int32_t>(f, s.iterations);
  put_doubles(f, s.deltas);
  put_doubles(f, s.sup_slopes);
  put_doubles(f, s.slope);
  if (!f) throw Error(ErrorKind::Io, "failed writing " + path);
}

SectionGrid load_section(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot read " + path);
  char magic[8];
  f.read(magic, sizeof(magic));
  if (!f || std::memcmp(magic, kSectionMagic, sizeof(magic)) != 0)
    throw Error(ErrorKind::Io, path + " is not a section dump");
  SectionGrid s;
  s.index = get<std::int32_t>(f);
  s.l = get<std::int32_t>(f);
  s.dimension = get<std::int32_t>(f);
  s.grid.base = get<std::int32_t>(f);
  s.grid.fiber = get<std::int32_t>(f);
  const int k = get<std::int32_t>(f);
  if (s.dimension <= 0 || s.dimension > 16 || k < 0 || k > 16 || s.grid.base <= 0 || s.grid.fiber <= 0)
    throw Error(ErrorKind::Io, "corrupt section header");
  s.a.resize(k);
  for (int i = 0; i < k; ++i) s.a(i) = get<std::int32_t>(f);
  s.direction.resize(s.dimension);
  for (int i = 0; i < s.dimension; ++i) s.direction(i) = get<double>(f);
  s.gamma = get<double>(f);
  s.growth_constant = get<double>(f);
  s.transversality_constant = get<double>(f);
  s.residual = get<double>(f);
  s.contraction_bound = get<double>(f);
  s.interpolation_error = get<double>(f);
  s.iterations = get<std::int32_t>(f);
  s.deltas = get_doubles(f, 1u << 24);
  s.sup_slopes = get_doubles(f, 1u << 24);
  s.slope = get_doubles(f, s.base_nodes() * static_cast<std::uint64_t>(s.grid.fiber));
  if (s.slope.size() != s.base_nodes() * static_cast<std::size_t>(s.grid.fiber))
    throw Error(ErrorKind::Io, "section dump size mismatch");
  return s;
}

}  // namespace toralrig
