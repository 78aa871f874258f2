// SPDX-License-Identifier: Apache-2.0
#include "toralrig/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "toralrig/error.hpp"
#include "toralrig/parallel.hpp"

namespace toralrig {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr long double kTwoPiL = 2.0L * std::numbers::pi_v<long double>;
constexpr int kGridPathLimit = 8;

long double frac(long double v) { return v - std::floor(v); }

std::complex<double> phase(const Eigen::VectorXi& m, const long double* z) {
  long double t = 0.0L;
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (m(i) != 0) t += static_cast<long double>(m(i)) * z[i];
  t = frac(t);
  return {static_cast<double>(std::cos(kTwoPiL * t)), static_cast<double>(std::sin(kTwoPiL * t))};
}

CircleMap fold(int max_n, double shift, const std::vector<FourierTerm>& terms, const long double* z,
               const double* dz) {
  std::vector<std::complex<double>> coef(static_cast<std::size_t>(max_n));
  for (const auto& t : terms) {
    std::complex<double> w = t.c * phase(t.m, z);
    if (dz) {
      double md = 0.0;
      for (Eigen::Index i = 0; i < t.m.size(); ++i) md += t.m(i) * dz[i];
      w *= std::complex<double>(0.0, kTwoPi * md);
    }
    if (t.n == 0)
      shift += w.real();
    else if (t.n > 0)
      coef[t.n - 1] += w;
    else
      coef[-t.n - 1] += std::conj(w);
  }
  return CircleMap(shift, std::move(coef));
}

}  // namespace

FourierField::FourierField(int base_dimension, double rotation, std::vector<FourierTerm> terms, int degree_cap)
    : dim_(base_dimension), rotation_(rotation), terms_(std::move(terms)) {
  if (dim_ <= 0) throw Error(ErrorKind::InvalidInput, "field base dimension must be positive");
  bounds_.sz = Eigen::VectorXd::Zero(dim_);
  bounds_.szy = Eigen::VectorXd::Zero(dim_);
  std::vector<FourierTerm> kept;
  for (auto& t : terms_) {
    if (t.m.size() == 0) t.m = Eigen::VectorXi::Zero(dim_);
    if (t.m.size() != dim_) throw Error(ErrorKind::InvalidInput, "Fourier index has wrong dimension");
    if (std::abs(t.n) > degree_cap || (t.m.size() && t.m.cwiseAbs().maxCoeff() > degree_cap))
      throw Error(ErrorKind::InvalidInput, "Fourier index exceeds degree cap " + std::to_string(degree_cap));
    if (t.c == std::complex<double>(0.0, 0.0)) continue;
    if (t.n == 0 && t.m.isZero()) {
      rotation_ += t.c.real();
      continue;
    }
    kept.push_back(t);
  }
  terms_ = std::move(kept);
  for (const auto& t : terms_) {
    const double a = std::abs(t.c), n = std::abs(t.n);
    max_n_ = std::max(max_n_, std::abs(t.n));
    bounds_.amplitude += a;
    bounds_.s1y += kTwoPi * n * a;
    bounds_.s2yy += kTwoPi * kTwoPi * n * n * a;
    for (int i = 0; i < dim_; ++i) {
      bounds_.sz(i) += kTwoPi * std::abs(t.m(i)) * a;
      bounds_.szy(i) += kTwoPi * kTwoPi * std::abs(t.m(i)) * n * a;
    }
  }
  bounds_.max_slope = 1.0 + bounds_.s1y;
  bounds_.min_slope = 1.0 - bounds_.s1y;
  if (bounds_.min_slope <= 0.0) {
    const int res = dim_ <= 2 ? 32 : (dim_ == 3 ? 12 : 6);
    long long nodes = 1;
    for (int i = 0; i < dim_; ++i) nodes *= res;
    double lo = std::numeric_limits<double>::infinity();
    std::vector<long double> z(dim_);
    for (long long idx = 0; idx < nodes; ++idx) {
      long long r = idx;
      for (int i = 0; i < dim_; ++i) {
        z[i] = static_cast<long double>(r % res) / res;
        r /= res;
      }
      CircleMap f = at(z.data());
      for (int j = 0; j < 128; ++j) lo = std::min(lo, f.derivative(j / 128.0));
    }
    if (lo <= 0.0) throw Error(ErrorKind::InvalidCircleMap, "field has non-positive fiber derivative");
    bounds_.min_slope = lo;
  }
}

FourierField FourierField::constant(int base_dimension, const CircleMap& map) {
  std::vector<FourierTerm> terms;
  const auto& c = map.coefficients();
  for (std::size_t k = 0; k < c.size(); ++k)
    terms.push_back({Eigen::VectorXi::Zero(base_dimension), static_cast<int>(k + 1), c[k]});
  int cap = std::max<int>(kDegreeCap, static_cast<int>(c.size()));
  return FourierField(base_dimension, map.shift(), std::move(terms), cap);
}

bool FourierField::x_independent() const {
  for (const auto& t : terms_)
    if (!t.m.isZero()) return false;
  return true;
}

CircleMap FourierField::at(const long double* z) const { return fold(max_n_, rotation_, terms_, z, nullptr); }

CircleMap FourierField::directional(const long double* z, const double* dz) const {
  return fold(max_n_, 0.0, terms_, z, dz);
}

Jet propagate(const std::vector<PathStep>& path, Jet jet) {
  for (const auto& s : path) {
    if (!s.inverse) {
      double v, d, dv, dd;
      s.map.evaluate(jet.y, v, d);
      s.dmap.offset(jet.y, dv, dd);
      jet.dx = d * jet.dx + dv;
      jet.dy *= d;
      jet.y = v;
    } else {
      const double v = s.map.inverse(jet.y);
      const double d = s.map.derivative(v);
      double dv, dd;
      s.dmap.offset(v, dv, dd);
      jet.dx = (jet.dx - dv) / d;
      jet.dy /= d;
      jet.y = v;
    }
  }
  return jet;
}

CircleCocycle::CircleCocycle(GeneratorSet action, std::vector<FourierField> fields, std::vector<GeneratorWord> words,
                             double compatibility_tol, std::uint64_t seed)
    : action_(std::move(action)), fields_(std::move(fields)), positive_(std::move(words)) {
  const int d = action_.dimension(), k = action_.rank();
  if (!action_.unimodular()) throw Error(ErrorKind::NotUnimodular, "cocycle base action must be unimodular");
  if (static_cast<int>(positive_.size()) != k)
    throw Error(ErrorKind::InvalidInput, "one generator word per generator required");
  for (const auto& f : fields_)
    if (f.base_dimension() != d) throw Error(ErrorKind::InvalidInput, "field dimension differs from the action");
  for (int j = 0; j < k; ++j) {
    GeneratorWord neg;
    for (auto it = positive_[j].rbegin(); it != positive_[j].rend(); ++it) {
      if (it->field < 0 || it->field >= static_cast<int>(fields_.size()))
        throw Error(ErrorKind::InvalidInput, "word refers to an unknown field");
      if (it->base.rows() != d || it->base.cols() != d)
        throw Error(ErrorKind::InvalidInput, "word base matrix has wrong shape");
      neg.push_back({it->field, multiply_checked(it->base, action_.inverse(j)), !it->inverse});
    }
    negative_.push_back(std::move(neg));
  }
  if (k < 2 || constant()) {
    if (k >= 2) {
      // Constant fields still need commuting generator maps.
      Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
          compatibility_defect_ = std::max(
              compatibility_defect_, c0_distance(evaluate_word({{j, 1}, {i, 1}}, x), evaluate_word({{i, 1}, {j, 1}}, x), 64));
    }
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int s = 0; s < 32; ++s) {
      Eigen::VectorXd x(d);
      for (int i = 0; i < d; ++i) x(i) = u(rng);
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
          compatibility_defect_ = std::max(
              compatibility_defect_, c0_distance(evaluate_word({{j, 1}, {i, 1}}, x), evaluate_word({{i, 1}, {j, 1}}, x), 64));
    }
  }
  if (compatibility_defect_ > compatibility_tol)
    throw Error(ErrorKind::CompatibilityViolated,
                "generator fields violate the cocycle identity (defect " + std::to_string(compatibility_defect_) + ")");
}

bool CircleCocycle::constant() const {
  for (const auto& f : fields_)
    if (!f.x_independent()) return false;
  return true;
}

std::vector<PathStep> CircleCocycle::path_word(const std::vector<std::pair<int, int>>& word, const Eigen::VectorXd& x,
                                               const Eigen::VectorXd* direction) const {
  const int d = action_.dimension();
  std::vector<long double> cur(d), z(d), next(d);
  for (int i = 0; i < d; ++i) cur[i] = frac(static_cast<long double>(x(i)));
  Eigen::VectorXd dir;
  if (direction) dir = *direction;
  std::vector<double> dz(d);
  std::vector<PathStep> out;
  for (const auto& [j, sign] : word) {
    const GeneratorWord& w = sign > 0 ? positive_[j] : negative_[j];
    for (const auto& f : w) {
      for (int r = 0; r < d; ++r) {
        long double s = 0.0L;
        for (int c = 0; c < d; ++c) s += static_cast<long double>(f.base(r, c)) * cur[c];
        z[r] = frac(s);
      }
      PathStep step;
      step.map = fields_[f.field].at(z.data());
      step.inverse = f.inverse;
      if (direction) {
        for (int r = 0; r < d; ++r) {
          double s = 0.0;
          for (int c = 0; c < d; ++c) s += static_cast<double>(f.base(r, c)) * dir(c);
          dz[r] = s;
        }
        step.dmap = fields_[f.field].directional(z.data(), dz.data());
      }
      out.push_back(std::move(step));
    }
    const IntMatrix& m = sign > 0 ? action_.generator(j) : action_.inverse(j);
    for (int r = 0; r < d; ++r) {
      long double s = 0.0L;
      for (int c = 0; c < d; ++c) s += static_cast<long double>(m(r, c)) * cur[c];
      next[r] = frac(s);
    }
    cur.swap(next);
    if (direction) dir = m.cast<double>() * dir;
  }
  return out;
}

namespace {
std::vector<std::pair<int, int>> canonical_word(const LatticePoint& a) {
  std::vector<std::pair<int, int>> word;
  for (int j = 0; j < a.size(); ++j)
    for (int s = 0; s < std::abs(a(j)); ++s) word.emplace_back(j, a(j) > 0 ? 1 : -1);
  return word;
}
}  // namespace

std::vector<PathStep> CircleCocycle::path(const LatticePoint& a, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd* direction) const {
  if (a.size() != action_.rank()) throw Error(ErrorKind::InvalidInput, "lattice element has wrong rank");
  return path_word(canonical_word(a), x, direction);
}

CircleDiffeo CircleCocycle::evaluate_word(const std::vector<std::pair<int, int>>& word,
                                          const Eigen::VectorXd& x) const {
  CircleDiffeo out;
  for (auto& s : path_word(word, x, nullptr)) out.append(s.map, s.inverse);
  return out;
}

CircleDiffeo CircleCocycle::evaluate(const LatticePoint& a, const Eigen::VectorXd& x) const {
  if (a.size() != action_.rank()) throw Error(ErrorKind::InvalidInput, "lattice element has wrong rank");
  return evaluate_word(canonical_word(a), x);
}

CircleCocycle::ChainBounds CircleCocycle::chain_bounds(const LatticePoint& a) const {
  const int d = action_.dimension();
  ChainBounds b;
  b.x = Eigen::VectorXd::Zero(d);
  b.xy = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d);
  for (const auto& [j, sign] : canonical_word(a)) {
    const GeneratorWord& w = sign > 0 ? positive_[j] : negative_[j];
    for (const auto& f : w) {
      const FieldBounds& fb = fields_[f.field].bounds();
      double g1max = fb.max_slope, g1min = fb.min_slope, g2 = fb.s2yy;
      Eigen::VectorXd gz = fb.sz, gzy = fb.szy;
      if (f.inverse) {
        const double lo = fb.min_slope;
        g1max = 1.0 / lo;
        g1min = 1.0 / fb.max_slope;
        g2 = fb.s2yy / (lo * lo * lo);
        gzy = fb.szy / (lo * lo) + fb.sz * (fb.s2yy / (lo * lo * lo));
        gz = fb.sz / lo;
      }
      const Eigen::MatrixXd p = (f.base.cast<double>() * m).cwiseAbs();
      const Eigen::VectorXd gx = p.transpose() * gz, gxy = p.transpose() * gzy;
      b.d2 = g2 * b.d1max * b.d1max + g1max * b.d2;
      b.xy = (gxy + g2 * b.x) * b.d1max + g1max * b.xy;
      b.x = gx + g1max * b.x;
      b.d1max *= g1max;
      b.d1min *= g1min;
    }
    m = (sign > 0 ? action_.generator(j) : action_.inverse(j)).cast<double>() * m;
  }
  return b;
}

CircleCocycle identity_cocycle(const GeneratorSet& gens) {
  std::vector<GeneratorWord> words;
  for (int j = 0; j < gens.rank(); ++j) words.push_back({{0, identity_matrix(gens.dimension()), false}});
  return CircleCocycle(gens, {FourierField(gens.dimension(), 0.0, {})}, std::move(words));
}

CircleCocycle constant_cocycle(const GeneratorSet& gens, const std::vector<CircleMap>& maps) {
  if (static_cast<int>(maps.size()) != gens.rank())
    throw Error(ErrorKind::InvalidInput, "one constant map per generator required");
  std::vector<FourierField> fields;
  std::vector<GeneratorWord> words;
  for (int j = 0; j < gens.rank(); ++j) {
    fields.push_back(FourierField::constant(gens.dimension(), maps[j]));
    words.push_back({{j, identity_matrix(gens.dimension()), false}});
  }
  return CircleCocycle(gens, std::move(fields), std::move(words));
}

CircleCocycle constant_rotations(const GeneratorSet& gens, const std::vector<double>& angles) {
  std::vector<CircleMap> maps;
  for (double t : angles) maps.push_back(CircleMap::rotation(t));
  return constant_cocycle(gens, maps);
}

CircleCocycle coboundary_construct(const FourierField& phi, const std::vector<CircleMap>& beta0,
                                   const GeneratorSet& gens) {
  const int d = gens.dimension();
  if (static_cast<int>(beta0.size()) != gens.rank())
    throw Error(ErrorKind::InvalidInput, "one constant map per generator required");
  std::vector<FourierField> fields{phi};
  std::vector<GeneratorWord> words;
  for (int j = 0; j < gens.rank(); ++j) {
    fields.push_back(FourierField::constant(d, beta0[j]));
    words.push_back({{0, identity_matrix(d), true}, {j + 1, identity_matrix(d), false}, {0, gens.generator(j), false}});
  }
  return CircleCocycle(gens, std::move(fields), std::move(words));
}

CircleMap sine_map(double eps) { return CircleMap(0.0, {std::complex<double>(0.0, -eps / kTwoPi)}); }

FourierField sine_product_field(int base_dimension, double eps, int coordinate) {
  if (coordinate < 0 || coordinate >= base_dimension) throw Error(ErrorKind::InvalidInput, "coordinate out of range");
  Eigen::VectorXi minus = Eigen::VectorXi::Zero(base_dimension), plus = minus;
  minus(coordinate) = -1;
  plus(coordinate) = 1;
  const double c = eps / (2.0 * kTwoPi);
  return FourierField(base_dimension, 0.0, {{minus, 1, {c, 0.0}}, {plus, 1, {-c, 0.0}}});
}

DerivativeBounds derivative_bounds(const CircleCocycle& beta, const LatticePoint& a, GridSpec grid) {
  const int d = beta.action().dimension();
  if (grid.base < 1 || grid.fiber < 1) throw Error(ErrorKind::InvalidInput, "grid resolution must be positive");
  DerivativeBounds out;
  out.grid = grid;
  const bool flat = beta.constant();
  std::size_t nodes = 1;
  if (!flat)
    for (int i = 0; i < d; ++i) nodes *= static_cast<std::size_t>(grid.base);
  out.node_max.assign(nodes, 0.0);
  out.node_min.assign(nodes, 0.0);
  parallel_for(nodes, [&](std::size_t lo, std::size_t hi) {
    Eigen::VectorXd x(d);
    for (std::size_t idx = lo; idx < hi; ++idx) {
      std::size_t r = idx;
      for (int i = 0; i < d; ++i) {
        x(i) = flat ? 0.0 : static_cast<double>(r % grid.base) / grid.base;
        if (!flat) r /= grid.base;
      }
      const auto steps = beta.path(a, x);
      double mx = 0.0, mn = std::numeric_limits<double>::infinity();
      for (int j = 0; j < grid.fiber; ++j) {
        Jet jet;
        jet.y = static_cast<double>(j) / grid.fiber;
        jet = propagate(steps, jet);
        mx = std::max(mx, jet.dy);
        mn = std::min(mn, jet.dy);
      }
      out.node_max[idx] = mx;
      out.node_min[idx] = mn;
    }
  });
  out.grid_sup_derivative = *std::max_element(out.node_max.begin(), out.node_max.end());
  const double gmin = *std::min_element(out.node_min.begin(), out.node_min.end());
  out.grid_sup_inverse_derivative = 1.0 / gmin;
  const auto chain = beta.chain_bounds(a);
  out.chain_sup_derivative = chain.d1max;
  out.chain_sup_inverse_derivative = 1.0 / chain.d1min;
  double margin = 0.5 * chain.d2 / grid.fiber;
  if (!flat) margin += 0.5 * chain.xy.sum() / grid.base;
  out.margin = margin;
  out.sup_derivative = std::min(out.grid_sup_derivative + margin, out.chain_sup_derivative);
  out.sup_inverse_derivative = out.chain_sup_inverse_derivative;
  if (gmin - margin > 0.0) out.sup_inverse_derivative = std::min(out.sup_inverse_derivative, 1.0 / (gmin - margin));
  return out;
}

namespace {

struct GeneratorSups {
  std::vector<double> fwd, inv;  // sup of D beta(e_j) and of its reciprocal
};

GeneratorSups generator_sups(const CircleCocycle& beta, GridSpec grid) {
  GeneratorSups g;
  const int k = beta.action().rank();
  for (int j = 0; j < k; ++j) {
    LatticePoint e = LatticePoint::Zero(k);
    e(j) = 1;
    const auto b = derivative_bounds(beta, e, grid);
    g.fwd.push_back(b.sup_derivative);
    g.inv.push_back(b.sup_inverse_derivative);
  }
  return g;
}

double r_power(double base, double r) {
  if (r == 0.0) return 1.0;
  return std::pow(base, r);
}

BunchingCertificate bunching_impl(const CircleCocycle& beta, const LyapunovSpectrum& spectrum, const LatticePoint& a,
                                  double r, int k_max, GridSpec grid, const GeneratorSups& sups) {
  const GeneratorSet& gens = beta.action();
  if (a.size() != gens.rank()) throw Error(ErrorKind::InvalidInput, "lattice element has wrong rank");
  if (r < 0.0 || std::isnan(r)) throw Error(ErrorKind::InvalidInput, "r must be non-negative");
  const Eigen::MatrixXd U = spectrum.unstable_basis(a);
  if (U.cols() == 0) throw Error(ErrorKind::InvalidInput, "element has no unstable directions");
  const bool infinite = std::isinf(r);
  for (int k = 1; k <= k_max; ++k) {
    const LatticePoint ka = a * k;
    const double inv = spectrum.adapted_unstable_inverse_norm(ka);
    double sd = 1.0, si = 1.0;
    for (int j = 0; j < ka.size(); ++j) {
      const int n = std::abs(ka(j));
      const double f = ka(j) > 0 ? sups.fwd[j] : sups.inv[j];
      const double g = ka(j) > 0 ? sups.inv[j] : sups.fwd[j];
      sd *= std::pow(f, n);
      si *= std::pow(g, n);
    }
    BunchingCertificate c;
    c.a = a;
    c.k = k;
    c.r = r;
    c.grid = grid;
    c.unstable_inverse_norm = inv;
    c.method = "submultiplicative";
    c.sup_derivative = sd;
    c.sup_inverse_derivative = si;
    c.sup_first = inv * sd;
    if (infinite)
      c.sup_second = si <= 1.0 + 1e-12 ? c.sup_first : std::numeric_limits<double>::infinity();
    else
      c.sup_second = inv * sd * r_power(si, r);
    if (ka.cwiseAbs().sum() <= kGridPathLimit) {
      const auto db = derivative_bounds(beta, ka, grid);
      double second = 0.0;
      for (std::size_t n = 0; n < db.node_max.size(); ++n) {
        const double hi = std::min(db.node_max[n] + db.margin, db.chain_sup_derivative);
        double lo_inv = db.chain_sup_inverse_derivative;
        if (db.node_min[n] - db.margin > 0.0) lo_inv = std::min(lo_inv, 1.0 / (db.node_min[n] - db.margin));
        if (infinite)
          second = std::max(second, lo_inv <= 1.0 + 1e-12 ? hi : std::numeric_limits<double>::infinity());
        else
          second = std::max(second, hi * r_power(lo_inv, r));
      }
      second *= inv;
      const double first = inv * db.sup_derivative;
      if (first <= c.sup_first) {
        c.sup_first = first;
        c.sup_derivative = db.sup_derivative;
        c.method = "grid";
      }
      if (second <= c.sup_second) {
        c.sup_second = second;
        c.sup_inverse_derivative = std::min(c.sup_inverse_derivative, db.sup_inverse_derivative);
        c.method = "grid";
      }
    }
    c.margin = r == 0.0 ? c.sup_first : std::max(c.sup_first, c.sup_second);
    if (c.sup_first < 1.0 && (r == 0.0 || c.sup_second < 1.0)) return c;
  }
  std::vector<long long> payload(a.data(), a.data() + a.size());
  payload.push_back(k_max);
  throw Error(ErrorKind::NotBunchedWithin, "no bunched iterate up to k = " + std::to_string(k_max), payload);
}

}  // namespace

BunchingCertificate bunching_check(const CircleCocycle& beta, const LyapunovSpectrum& spectrum, const LatticePoint& a,
                                   double r, int k_max, GridSpec grid) {
  return bunching_impl(beta, spectrum, a, r, k_max, grid, generator_sups(beta, grid));
}

PHProbe ph_probe(const CircleCocycle& beta, const LyapunovSpectrum& spectrum, const WeylChamberDecomposition& dec,
                 GridSpec grid, int k_max) {
  PHProbe out;
  out.all_certified = !dec.chambers.empty();
  const GeneratorSups sups = generator_sups(beta, grid);
  for (std::size_t c = 0; c < dec.chambers.size(); ++c) {
    ChamberPH entry;
    entry.chamber = static_cast<int>(c);
    if (!dec.chambers[c].representative) {
      entry.failure = "no representative";
      out.all_certified = false;
      out.chambers.push_back(std::move(entry));
      continue;
    }
    entry.representative = *dec.chambers[c].representative;
    try {
      entry.certificate = bunching_impl(beta, spectrum, entry.representative, 0.0, k_max, grid, sups);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotBunchedWithin) throw;
      entry.failure = e.what();
      out.all_certified = false;
    }
    out.chambers.push_back(std::move(entry));
  }
  return out;
}

PHRobustnessCertificate ph_robustness(const CircleCocycle& beta, const LyapunovSpectrum& spectrum,
                                      const LatticePoint& a, const BunchingCertificate& cert, int sample_count,
                                      double norm_cap, double safety, std::uint64_t seed, GridSpec grid, int k_max) {
  const int k = beta.action().rank();
  if (!(cert.margin > 0.0 && cert.margin < 1.0))
    throw Error(ErrorKind::InvalidInput, "certificate margin must lie in (0, 1)");
  PHRobustnessCertificate out;
  out.a = a;
  out.k0 = cert.k;
  out.lambda = -std::log(cert.margin);
  out.safety = safety;
  for (const auto& s : spectrum.spaces) out.D1 = std::max(out.D1, s.functional.norm());
  const GeneratorSups sups = generator_sups(beta, grid);
  double worst_log = 0.0;
  for (int j = 0; j < k; ++j) worst_log = std::max({worst_log, std::log(sups.fwd[j]), std::log(sups.inv[j])});
  out.D2 = std::sqrt(static_cast<double>(k)) * worst_log;
  out.epsilon = safety * out.lambda / ((out.D1 + out.D2) * out.k0);
  out.C0 = spectrum.growth_constant;
  out.C1 = 1.0 / out.C0;

  const Eigen::VectorXd ad = a.cast<double>();
  const Eigen::VectorXd u = ad.normalized();
  auto close = [&](const LatticePoint& b) {
    const Eigen::VectorXd bd = b.cast<double>();
    return bd.norm() > 0.0 && (bd.normalized() - u).norm() < out.epsilon;
  };
  auto regular = [&](const LatticePoint& b) {
    const double nb = b.cast<double>().norm();
    for (const auto& s : spectrum.spaces)
      if (std::abs(s.value(b)) <= 1e-9 * nb) return false;
    return true;
  };
  auto collinear = [&](const LatticePoint& b) {
    const Eigen::VectorXd bd = b.cast<double>();
    return (bd - bd.dot(u) * u).norm() < 1e-9 * bd.norm();
  };

  std::vector<LatticePoint> chosen;
  auto seen = [&](const LatticePoint& b) {
    return std::any_of(chosen.begin(), chosen.end(), [&](const LatticePoint& c) { return c == b; });
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double lo_t = ad.norm(), hi_t = std::max(norm_cap, lo_t);
  const long attempts = 400L * std::max(1, sample_count);
  for (long t = 0; t < attempts && static_cast<int>(chosen.size()) < sample_count; ++t) {
    Eigen::VectorXd w(k);
    for (int i = 0; i < k; ++i) w(i) = gauss(rng);
    w -= w.dot(u) * u;
    if (w.norm() > 0.0) w.normalize();
    const double len = lo_t + (hi_t - lo_t) * unit(rng);
    const Eigen::VectorXd p = len * (u + 0.95 * out.epsilon * unit(rng) * w);
    LatticePoint b(k);
    for (int i = 0; i < k; ++i) b(i) = static_cast<int>(std::lround(p(i)));
    if (!close(b) || !regular(b) || seen(b) || b.cast<double>().norm() > hi_t) continue;
    chosen.push_back(b);
  }
  std::vector<PHSample> samples;
  for (const auto& b : chosen) samples.push_back({b, false, 0.0, 0});
  for (int n = 2; n <= 10; ++n) samples.push_back({a * n, true, 0.0, 0});

  out.cutoff_N = std::numeric_limits<double>::infinity();
  double worst = -1.0;
  for (auto& s : samples) {
    try {
      const auto c = bunching_impl(beta, spectrum, s.b, 0.0, k_max, grid, sups);
      s.margin = c.margin;
      s.k = c.k;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotBunchedWithin) throw;
      std::vector<long long> payload(s.b.data(), s.b.data() + s.b.size());
      throw Error(ErrorKind::SampleFailed, "sample outside PH", payload);
    }
    if (!s.forced && !collinear(s.b)) out.cutoff_N = std::min(out.cutoff_N, s.b.cast<double>().norm());
    if (s.margin > worst) {
      worst = s.margin;
      out.n0 = static_cast<long>(std::floor(s.b.cast<double>().norm() / (out.k0 * ad.norm())));
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < spectrum.size(); ++i) {
        const double v = spectrum.spaces[i].value(s.b);
        if (v > 0.0 && v < best) {
          best = v;
          out.chi0 = i;
        }
      }
    }
  }
  out.samples = std::move(samples);
  return out;
}

FixedPointReport fixed_point_trivial_check(const CircleCocycle& beta, double tol, std::size_t max_points) {
  const GeneratorSet& gens = beta.action();
  const int d = gens.dimension(), k = gens.rank();
  FixedPointReport out;
  out.trivial = true;
  for (int j = 0; j < k; ++j) {
    FixedPointWitness w;
    w.generator = j;
    const IntMatrix m = gens.generator(j) - identity_matrix(d);
    if (determinant(m) == 0) {
      w.regular = false;
      out.trivial = false;
      out.generators.push_back(w);
      continue;
    }
    const auto pts = torus_preimages_of_zero(m);
    w.fixed_points = pts.size();
    w.best_distance = std::numeric_limits<double>::infinity();
    LatticePoint e = LatticePoint::Zero(k);
    e(j) = 1;
    for (std::size_t p = 0; p < pts.size() && p < max_points; ++p) {
      Eigen::VectorXd x(d);
      for (int i = 0; i < d; ++i) x(i) = pts[p][i].convert_to<double>();
      const double dist = distance_from_identity(beta.evaluate(e, x));
      if (dist < w.best_distance) w.best_distance = dist;
      if (dist < tol) {
        w.witness = x;
        break;
      }
    }
    if (!w.witness) out.trivial = false;
    out.generators.push_back(w);
  }
  return out;
}

}  // namespace toralrig
