// SPDX-License-Identifier: Apache-2.0
#include "toralrig/holonomy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>

#include "toralrig/error.hpp"
#include "toralrig/parallel.hpp"

namespace toralrig {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

long double frac(long double v) { return v - std::floor(v); }

std::vector<long long> payload_of(const LatticePoint& a, std::initializer_list<long long> extra = {}) {
  std::vector<long long> p(a.data(), a.data() + a.size());
  p.insert(p.end(), extra.begin(), extra.end());
  return p;
}

// Backward orbit P_k = A^{-k} p mod 1 and displacements D_k = A^{-k}(q - p) restricted to E^u.
struct BackwardOrbit {
  std::vector<Eigen::VectorXd> P, Q;
};

BackwardOrbit backward_orbit(const IntMatrix& inverse, const Eigen::MatrixXd& basis, const Eigen::MatrixXd& rinv,
                             const Eigen::VectorXd& p, const Eigen::VectorXd& q, int n) {
  const int d = static_cast<int>(p.size());
  BackwardOrbit o;
  std::vector<long double> cur(d), next(d);
  for (int i = 0; i < d; ++i) cur[i] = frac(static_cast<long double>(p(i)));
  Eigen::VectorXd w = basis.transpose() * (q - p);
  for (int k = 1; k <= n; ++k) {
    for (int r = 0; r < d; ++r) {
      long double s = 0.0L;
      for (int c = 0; c < d; ++c) s += static_cast<long double>(inverse(r, c)) * cur[c];
      next[r] = frac(s);
    }
    cur.swap(next);
    w = rinv * w;
    Eigen::VectorXd pk(d);
    for (int i = 0; i < d; ++i) pk(i) = static_cast<double>(cur[i]);
    o.P.push_back(pk);
    o.Q.push_back(pk + basis * w);
  }
  return o;
}

void apply_inner(const CircleCocycle& beta, const LatticePoint& a, const BackwardOrbit& o, int n,
                 std::vector<double>& ys) {
  for (int k = 0; k < n; ++k) {
    const CircleDiffeo g = beta.evaluate(a, o.P[k]);
    for (auto& y : ys) y = g.inverse_apply(y);
  }
}

void apply_outer(const CircleCocycle& beta, const LatticePoint& a, const BackwardOrbit& o, int n,
                 std::vector<double>& ys) {
  for (int k = n - 1; k >= 0; --k) beta.evaluate(a, o.Q[k]).apply_in_place(ys);
}

void check_on_leaf(const Eigen::MatrixXd& basis, const Eigen::VectorXd& v, const LatticePoint& a) {
  const Eigen::VectorXd rest = v - basis * (basis.transpose() * v);
  if (rest.norm() > 1e-9 * (1.0 + v.norm()))
    throw Error(ErrorKind::NotOnUnstableLeaf, "q - p is not in the unstable space", payload_of(a));
}

double sup_circle_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(circle_difference(a[i], b[i])));
  return m;
}

std::vector<double> fiber_samples(int n) {
  std::vector<double> ys(n);
  for (int j = 0; j < n; ++j) ys[j] = static_cast<double>(j) / n;
  return ys;
}

CircleMap map_from_samples(const double* disp, int F) {
  double mean = 0.0;
  for (int j = 0; j < F; ++j) mean += disp[j];
  mean /= F;
  const int top = F / 2;
  std::vector<std::complex<double>> coef(static_cast<std::size_t>(top));
  for (int n = 1; n <= top; ++n) {
    std::complex<double> acc = 0.0;
    for (int j = 0; j < F; ++j) {
      const double t = -kTwoPi * static_cast<double>((static_cast<long>(n) * j) % F) / F;
      acc += disp[j] * std::complex<double>(std::cos(t), std::sin(t));
    }
    coef[n - 1] = (2 * n == F ? 1.0 : 2.0) * acc / static_cast<double>(F);
    if (2 * n == F) coef[n - 1] = {coef[n - 1].real(), 0.0};
  }
  for (auto& c : coef)
    if (std::abs(c) < 1e-17) c = 0.0;
  return CircleMap(mean, std::move(coef));
}

}  // namespace

CoverLattice cover_lattice(const GeneratorSet& gens) {
  const int d = gens.dimension(), k = gens.rank();
  BigMatrix stacked(d, d * k);
  for (int j = 0; j < k; ++j) {
    const IntMatrix m = gens.generator(j) - identity_matrix(d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) stacked(r, j * d + c) = BigInt(m(r, c));
  }
  const SmithForm snf = smith_normal_form(stacked);
  CoverLattice out;
  out.rank = snf.rank;
  out.elementary_divisors = snf.divisors;
  if (snf.rank < d)
    throw Error(ErrorKind::DegenerateLattice, "the lattice spanned by A_j - I has rank " + std::to_string(snf.rank),
                {snf.rank});
  out.index = 1;
  for (const auto& v : snf.divisors) out.index *= v;
  out.basis = column_hermite_basis(stacked).to_int();
  return out;
}

HolonomyResult unstable_holonomy(const CircleCocycle& beta, const LyapunovSpectrum& spectrum, const LatticePoint& a,
                                 const Eigen::VectorXd& p, const Eigen::VectorXd& q, double tol, int n_max) {
  const GeneratorSet& gens = beta.action();
  const Eigen::MatrixXd U = spectrum.unstable_basis(a);
  if (U.cols() == 0) throw Error(ErrorKind::InvalidInput, "element has no unstable directions");
  check_on_leaf(U, q - p, a);
  HolonomyResult out;
  out.rho_predicted = spectrum.adapted_unstable_inverse_norm(a) * derivative_bounds(beta, a, GridSpec{}).sup_derivative;
  if ((q - p).norm() == 0.0) return out;
  const Eigen::MatrixXd R = U.transpose() * gens.element(a).cast<double>() * U;
  const Eigen::MatrixXd rinv = R.inverse();
  const IntMatrix inverse = gens.element(-a);

  const std::vector<double> base = fiber_samples(16);
  const BackwardOrbit orbit = backward_orbit(inverse, U, rinv, p, q, n_max + 1);
  auto evaluate_n = [&](int n) {
    std::vector<double> ys = base;
    apply_inner(beta, a, orbit, n, ys);
    apply_outer(beta, a, orbit, n, ys);
    return ys;
  };
  std::vector<double> prev = evaluate_n(1);
  for (int n = 1; n <= n_max; ++n) {
    std::vector<double> cur = evaluate_n(n + 1);
    const double delta = sup_circle_gap(prev, cur);
    out.deltas.push_back(delta);
    prev.swap(cur);
    if (delta < tol) {
      out.steps = n + 1;
      for (int k = 0; k < out.steps; ++k) {
        const CircleDiffeo g = beta.evaluate(a, orbit.P[k]);
        out.map.append(g.inverse());
      }
      for (int k = out.steps - 1; k >= 0; --k) out.map.append(beta.evaluate(a, orbit.Q[k]));
      const double rho = std::min(out.rho_predicted, 0.999);
      out.error_bound = delta * rho / (1.0 - rho);
      return out;
    }
  }
  throw Error(ErrorKind::NoConvergence,
              "holonomy products did not settle within " + std::to_string(n_max) + " steps", payload_of(a, {n_max}));
}

double fitted_rate(const std::vector<double>& deltas, double floor) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < deltas.size(); ++i)
    if (deltas[i] > floor) pts.emplace_back(static_cast<double>(i), std::log(deltas[i]));
  std::vector<double> slopes;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      slopes.push_back((pts[j].second - pts[i].second) / (pts[j].first - pts[i].first));
  if (slopes.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::nth_element(slopes.begin(), slopes.begin() + slopes.size() / 2, slopes.end());
  double median = slopes[slopes.size() / 2];
  if (slopes.size() % 2 == 0) {
    const double lower = *std::max_element(slopes.begin(), slopes.begin() + slopes.size() / 2);
    median = 0.5 * (median + lower);
  }
  return std::exp(median);
}

TransferPlan plan_transfer(const CircleCocycle& beta, const LyapunovSpectrum& spectrum,
                           const WeylChamberDecomposition& dec, double tol, GridSpec grid, int k_max) {
  const GeneratorSet& gens = beta.action();
  const int d = gens.dimension();
  if (!dec.predicates.full) throw Error(ErrorKind::StageRefused, "transfer map requires a full action");
  TransferPlan plan;
  plan.tol = tol;
  Eigen::MatrixXd frame(d, d);
  int col = 0;
  for (std::size_t c = 0; c < dec.classes.size(); ++c) {
    const CoarseClass& cls = dec.classes[c];
    const Chamber* found = nullptr;
    for (const auto& ch : dec.chambers) {
      const std::vector<int> s = dec.functional_signs(ch);
      bool ok = true;
      for (int i = 0; i < static_cast<int>(s.size()) && ok; ++i) {
        const bool member = std::find(cls.members.begin(), cls.members.end(), i) != cls.members.end();
        ok = member ? s[i] > 0 : s[i] < 0;
      }
      if (ok) {
        found = &ch;
        break;
      }
    }
    if (!found || !found->representative)
      throw Error(ErrorKind::RepresentativeNotFound, "no representative for coarse class " + std::to_string(c),
                  {static_cast<long long>(c)});
    const LatticePoint rep = *found->representative;
    const BunchingCertificate cert = bunching_check(beta, spectrum, rep, 0.0, k_max, grid);
    LegPlan leg;
    leg.coarse_class = static_cast<int>(c);
    leg.bunching_k = cert.k;
    leg.a = rep * cert.k;
    leg.basis = spectrum.unstable_basis(leg.a);
    const Eigen::MatrixXd R = leg.basis.transpose() * gens.element(leg.a).cast<double>() * leg.basis;
    leg.inverse_restriction = R.inverse();
    leg.inverse = gens.element(-leg.a);
    leg.rho = spectrum.adapted_unstable_inverse_norm(leg.a) * derivative_bounds(beta, leg.a, grid).sup_derivative;
    if (!(leg.rho < 1.0))
      throw Error(ErrorKind::NotBunchedWithin, "holonomy rate is not contracting for class " + std::to_string(c),
                  payload_of(leg.a));
    const auto chain = beta.chain_bounds(leg.a);
    const double K = std::max(1.0, chain.x.norm() * std::sqrt(static_cast<double>(d)) * spectrum.growth_constant);
    const double n = std::log(tol * (1.0 - leg.rho) / K) / std::log(leg.rho);
    leg.steps = std::clamp(static_cast<int>(std::ceil(n)) + 2, 2, 400);
    if (col + leg.basis.cols() > d) throw Error(ErrorKind::InvalidInput, "coarse classes overlap");
    frame.middleCols(col, leg.basis.cols()) = leg.basis;
    col += static_cast<int>(leg.basis.cols());
    plan.legs.push_back(std::move(leg));
  }
  if (col != d) throw Error(ErrorKind::InvalidInput, "coarse classes do not span the torus");
  plan.coordinates = frame.inverse();
  return plan;
}

namespace {

void apply_leg(const CircleCocycle& beta, const LegPlan& leg, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
               std::vector<double>& ys, int steps) {
  if ((q - p).norm() == 0.0) return;
  const BackwardOrbit orbit = backward_orbit(leg.inverse, leg.basis, leg.inverse_restriction, p, q, steps);
  apply_inner(beta, leg.a, orbit, steps, ys);
  apply_outer(beta, leg.a, orbit, steps, ys);
}

void apply_transfer_steps(const CircleCocycle& beta, const TransferPlan& plan, const Eigen::VectorXd& x,
                          std::vector<double>& ys, bool descending, int extra) {
  const Eigen::VectorXd coords = plan.coordinates * x;
  const int m = static_cast<int>(plan.legs.size());
  std::vector<int> offset(m, 0);
  for (int c = 1; c < m; ++c) offset[c] = offset[c - 1] + static_cast<int>(plan.legs[c - 1].basis.cols());
  Eigen::VectorXd p = Eigen::VectorXd::Zero(x.size());
  for (int t = 0; t < m; ++t) {
    const int c = descending ? m - 1 - t : t;
    const LegPlan& leg = plan.legs[c];
    const Eigen::VectorXd u = leg.basis * coords.segment(offset[c], leg.basis.cols());
    const Eigen::VectorXd q = p + u;
    apply_leg(beta, leg, p, q, ys, leg.steps + extra);
    p = q;
  }
}

}  // namespace

void apply_transfer(const CircleCocycle& beta, const TransferPlan& plan, const Eigen::VectorXd& x,
                    std::vector<double>& ys, bool descending) {
  apply_transfer_steps(beta, plan, x, ys, descending, 0);
}

std::size_t TransferMap::nodes() const {
  std::size_t n = 1;
  for (int i = 0; i < dimension; ++i) n *= static_cast<std::size_t>(base);
  return n;
}

Eigen::VectorXd TransferMap::node_point(std::size_t index) const {
  Eigen::VectorXd t(dimension);
  for (int i = 0; i < dimension; ++i) {
    t(i) = static_cast<double>(index % base) / base;
    index /= base;
  }
  return lattice.cast<double>() * t;
}

CircleMap TransferMap::node_map(std::size_t index) const {
  return map_from_samples(displacement.data() + index * fiber, fiber);
}

CircleMap TransferMap::map_at(const Eigen::VectorXd& x) const {
  if (base < 6) throw Error(ErrorKind::InvalidInput, "interpolation needs at least 6 nodes per direction");
  const Eigen::VectorXd t = lattice.cast<double>().fullPivLu().solve(x);
  const int d = dimension;
  std::vector<int> lo(d);
  std::vector<std::array<double, 6>> w(d);
  for (int i = 0; i < d; ++i) {
    const double s = (t(i) - std::floor(t(i))) * base;
    const double fl = std::floor(s);
    const double f = s - fl;
    lo[i] = static_cast<int>(fl);
    for (int o = 0; o < 6; ++o) {
      double v = 1.0;
      for (int m = 0; m < 6; ++m)
        if (m != o) v *= (f - (m - 2)) / static_cast<double>(o - m);
      w[i][o] = v;
    }
  }
  std::vector<double> acc(static_cast<std::size_t>(fiber), 0.0);
  std::size_t combos = 1;
  for (int i = 0; i < d; ++i) combos *= 6;
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t r = c, idx = 0, stride = 1;
    double weight = 1.0;
    for (int i = 0; i < d; ++i) {
      const int o = static_cast<int>(r % 6);
      r /= 6;
      weight *= w[i][o];
      const int node = ((lo[i] + o - 2) % base + base) % base;
      idx += stride * static_cast<std::size_t>(node);
      stride *= base;
    }
    if (weight == 0.0) continue;
    const double* src = displacement.data() + idx * fiber;
    for (int j = 0; j < fiber; ++j) acc[j] += weight * src[j];
  }
  return map_from_samples(acc.data(), fiber);
}

TransferMap transfer_map(const CircleCocycle& beta, const TransferPlan& plan, const CoverLattice& cover, GridSpec grid,
                         int path_samples, std::uint64_t seed) {
  const int d = beta.action().dimension();
  TransferMap h;
  h.lattice = cover.basis;
  h.base = grid.base;
  h.fiber = grid.fiber;
  h.dimension = d;
  const std::size_t N = h.nodes();
  h.displacement.assign(N * grid.fiber, 0.0);
  const std::vector<double> ys0 = fiber_samples(grid.fiber);
  parallel_for(N, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t n = lo; n < hi; ++n) {
      std::vector<double> ys = ys0;
      apply_transfer(beta, plan, h.node_point(n), ys);
      for (int j = 0; j < grid.fiber; ++j) h.displacement[n * grid.fiber + j] = ys[j] - ys0[j];
    }
  });
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, N - 1);
  std::vector<std::size_t> chosen(static_cast<std::size_t>(std::max(0, path_samples)));
  for (auto& c : chosen) c = pick(rng);
  std::mutex m;
  parallel_for(chosen.size(), [&](std::size_t lo, std::size_t hi) {
    double path = 0.0, trunc = 0.0;
    for (std::size_t s = lo; s < hi; ++s) {
      const std::size_t n = chosen[s];
      std::vector<double> stored(grid.fiber);
      for (int j = 0; j < grid.fiber; ++j) stored[j] = ys0[j] + h.displacement[n * grid.fiber + j];
      std::vector<double> alt = ys0;
      apply_transfer(beta, plan, h.node_point(n), alt, true);
      path = std::max(path, sup_circle_gap(stored, alt));
      if (s < 8) {
        std::vector<double> longer = ys0;
        apply_transfer_steps(beta, plan, h.node_point(n), longer, false, 1);
        trunc = std::max(trunc, sup_circle_gap(stored, longer));
      }
    }
    std::lock_guard<std::mutex> lock(m);
    h.path_defect = std::max(h.path_defect, path);
    h.truncation_defect = std::max(h.truncation_defect, trunc);
  });
  return h;
}

namespace {
constexpr char kTransferMagic[8] = {'T', 'R', 'H', 'M', 'A', 'P', '0', '1'};

template <typename T>
void put(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& f) {
  T v{};
  f.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!f) throw Error(ErrorKind::Io, "truncated transfer dump");
  return v;
}
}  // namespace

void save_transfer(const TransferMap& h, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path);
  f.write(kTransferMagic, sizeof(kTransferMagic));
  put<std::int32_t>(f, h.dimension);
  put<std::int32_t>(f, h.base);
  put<std::int32_t>(f, h.fiber);
  for (int r = 0; r < h.dimension; ++r)
    for (int c = 0; c < h.dimension; ++c) put<std::int64_t>(f, h.lattice(r, c));
  put<double>(f, h.path_defect);
  put<double>(f, h.truncation_defect);
  put<std::uint64_t>(f, h.displacement.size());
  f.write(reinterpret_cast<const char*>(h.displacement.data()),
          static_cast<std::streamsize>(h.displacement.size() * sizeof(double)));
  if (!f) throw Error(ErrorKind::Io, "failed writing " + path);
}

TransferMap load_transfer(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot read " + path);
  char magic[8];
  f.read(magic, sizeof(magic));
  if (!f || std::memcmp(magic, kTransferMagic, sizeof(magic)) != 0)
    throw Error(ErrorKind::Io, path + " is not a transfer map dump");
  TransferMap h;
  h.dimension = get<std::int32_t>(f);
  h.base = get<std::int32_t>(f);
  h.fiber = get<std::int32_t>(f);
  if (h.dimension <= 0 || h.dimension > 16 || h.base <= 0 || h.fiber <= 0)
    throw Error(ErrorKind::Io, "corrupt transfer map header");
  h.lattice.resize(h.dimension, h.dimension);
  for (int r = 0; r < h.dimension; ++r)
    for (int c = 0; c < h.dimension; ++c) h.lattice(r, c) = get<std::int64_t>(f);
  h.path_defect = get<double>(f);
  h.truncation_defect = get<double>(f);
  const auto n = get<std::uint64_t>(f);
  if (n != h.nodes() * static_cast<std::uint64_t>(h.fiber)) throw Error(ErrorKind::Io, "transfer map size mismatch");
  h.displacement.resize(n);
  f.read(reinterpret_cast<char*>(h.displacement.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!f) throw Error(ErrorKind::Io, "truncated transfer dump");
  return h;
}

namespace {

std::vector<std::size_t> sample_nodes(std::size_t N, int samples, std::uint64_t seed) {
  std::vector<std::size_t> out{0};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, N - 1);
  for (int s = 0; s < samples; ++s) out.push_back(pick(rng));
  return out;
}

// h(A_j x)^{-1} o beta(e_j, x) o h(x) at a node.
CircleDiffeo reduced_at(const CircleCocycle& beta, const TransferMap& h, std::size_t node, int j) {
  const int k = beta.action().rank();
  LatticePoint e = LatticePoint::Zero(k);
  e(j) = 1;
  const Eigen::VectorXd x = h.node_point(node);
  CircleDiffeo g(h.node_map(node));
  g.append(beta.evaluate(e, x));
  g.append(h.map_at(beta.action().generator(j).cast<double>() * x), true);
  return g;
}

}  // namespace

ConstantReduction reduce_to_constant(const CircleCocycle& beta, const TransferMap& h, int samples,
                                     std::uint64_t seed) {
  const int k = beta.action().rank();
  ConstantReduction out;
  const auto nodes = sample_nodes(h.nodes(), samples, seed);
  for (int j = 0; j < k; ++j) {
    out.beta0.push_back(reduced_at(beta, h, 0, j));
    out.rotation.push_back(rotation_number(out.beta0.back()));
  }
  std::mutex m;
  parallel_for(nodes.size(), [&](std::size_t lo, std::size_t hi) {
    double local = 0.0;
    for (std::size_t s = lo; s < hi; ++s)
      for (int j = 0; j < k; ++j) local = std::max(local, c0_distance(reduced_at(beta, h, nodes[s], j), out.beta0[j], 64));
    std::lock_guard<std::mutex> lock(m);
    out.defect = std::max(out.defect, local);
  });
  return out;
}

CoboundaryReport coboundary_verify(const CircleCocycle& beta, const TransferPlan& plan, const TransferMap& h,
                                   const CoverLattice& cover, int samples, std::uint64_t seed) {
  const FixedPointReport fp = fixed_point_trivial_check(beta);
  if (!fp.trivial) {
    long long failing = 0;
    for (const auto& g : fp.generators)
      if (!g.witness) {
        failing = g.generator;
        break;
      }
    throw Error(ErrorKind::NotFixedPointTrivial,
                "cocycle is not fixed-point trivial at generator " + std::to_string(failing), {failing});
  }
  const int k = beta.action().rank();
  const int d = beta.action().dimension();
  CoboundaryReport out;
  const auto nodes = sample_nodes(h.nodes(), samples, seed);
  out.samples = nodes.size();
  const std::vector<double> ys0 = fiber_samples(h.fiber);
  std::mutex m;
  parallel_for(nodes.size(), [&](std::size_t lo, std::size_t hi) {
    double per = 0.0, res = 0.0;
    for (std::size_t s = lo; s < hi; ++s) {
      const std::size_t n = nodes[s];
      std::vector<double> stored(h.fiber);
      for (int j = 0; j < h.fiber; ++j) stored[j] = ys0[j] + h.displacement[n * h.fiber + j];
      for (int c = 0; c < d; ++c) {
        std::vector<double> shifted = ys0;
        apply_transfer(beta, plan, h.node_point(n) + cover.basis.col(c).cast<double>(), shifted);
        per = std::max(per, sup_circle_gap(stored, shifted));
      }
      for (int j = 0; j < k; ++j) res = std::max(res, distance_from_identity(reduced_at(beta, h, n, j), 64));
    }
    std::lock_guard<std::mutex> lock(m);
    out.periodicity_defect = std::max(out.periodicity_defect, per);
    out.identity_residual = std::max(out.identity_residual, res);
  });
  return out;
}

std::vector<ObstructionRow> periodic_obstruction(const CircleCocycle& beta, const LatticePoint& a, int max_period,
                                                 std::size_t max_points) {
  const GeneratorSet& gens = beta.action();
  const int d = gens.dimension();
  std::vector<ObstructionRow> rows;
  for (int n = 1; n <= max_period; ++n) {
    ObstructionRow row;
    row.period = n;
    const LatticePoint na = a * n;
    const IntMatrix m = gens.element(na) - identity_matrix(d);
    const BigInt det = determinant(m);
    if (det == 0)
      throw Error(ErrorKind::InvalidInput, "element is not hyperbolic; periodic points are not isolated",
                  payload_of(a, {n}));
    const BigInt count = det < 0 ? BigInt(-det) : det;
    row.points = count.convert_to<std::size_t>();
    if (row.points > max_points)
      throw Error(ErrorKind::InvalidInput, "too many periodic points at period " + std::to_string(n),
                  payload_of(a, {n}));
    const auto pts = torus_preimages_of_zero(m);
    row.entries.resize(pts.size());
    parallel_for(pts.size(), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t p = lo; p < hi; ++p) {
        Eigen::VectorXd x(d);
        for (int i = 0; i < d; ++i) x(i) = pts[p][i].convert_to<double>();
        const RotationNumber rn = rotation_number(beta.evaluate(na, x));
        ObstructionEntry& e = row.entries[p];
        e.period = n;
        e.point = x;
        e.rotation = rn.value;
        e.distance_from_zero = std::abs(circle_difference(rn.value, 0.0));
      }
    });
    for (const auto& e : row.entries) row.max_distance_from_zero = std::max(row.max_distance_from_zero, e.distance_from_zero);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace toralrig
