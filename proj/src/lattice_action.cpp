// SPDX-License-Identifier: Apache-2.0
#include "toralrig/lattice_action.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "toralrig/error.hpp"

namespace toralrig {

using cplx = std::complex<double>;
using cplxl = std::complex<long double>;

GeneratorSet::GeneratorSet(std::vector<IntMatrix> generators) : generators_(std::move(generators)) {
  if (generators_.empty()) throw Error(ErrorKind::InvalidInput, "empty generator set");
  dimension_ = static_cast<int>(generators_[0].rows());
  if (dimension_ <= 0) throw Error(ErrorKind::InvalidInput, "generators must be nonempty matrices");
  for (std::size_t j = 0; j < generators_.size(); ++j) {
    const auto& g = generators_[j];
    if (g.rows() != dimension_ || g.cols() != dimension_)
      throw Error(ErrorKind::InvalidInput, "generator " + std::to_string(j) + " is not " +
                                               std::to_string(dimension_) + "x" + std::to_string(dimension_),
                  {static_cast<long long>(j)});
  }
  unimodular_ = true;
  for (const auto& g : generators_) {
    BigInt det = determinant(g);
    if (det != 1 && det != -1) {
      unimodular_ = false;
      break;
    }
  }
  if (unimodular_)
    for (const auto& g : generators_) inverses_.push_back(unimodular_inverse(g));
}

const IntMatrix& GeneratorSet::inverse(int j) const {
  if (!unimodular_) throw Error(ErrorKind::NotUnimodular, "generator set is not unimodular");
  return inverses_[j];
}

IntMatrix GeneratorSet::element(const LatticePoint& a) const {
  if (a.size() != rank()) throw Error(ErrorKind::InvalidInput, "lattice element has wrong rank");
  IntMatrix out = identity_matrix(dimension_);
  for (int j = 0; j < rank(); ++j) {
    if (a(j) == 0) continue;
    if (a(j) < 0 && !unimodular_) throw Error(ErrorKind::NotUnimodular, "negative power of a non-unimodular generator");
    out = multiply_checked(out, matrix_power(generators_[j], a(j) < 0 ? inverses_[j] : generators_[j], a(j)));
  }
  return out;
}

Eigen::VectorXd GeneratorSet::apply(const LatticePoint& a, const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = x;
  for (int j = 0; j < rank(); ++j) {
    const IntMatrix& m = a(j) >= 0 ? generators_[j] : inverse(j);
    const Eigen::MatrixXd md = m.cast<double>();
    for (int s = 0; s < std::abs(a(j)); ++s) y = md * y;
  }
  return y;
}

int sup_norm(const LatticePoint& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0; }

namespace {

// 0 < 1 < -1 < 2 < -2 < ...
int coordinate_rank(int v) { return v > 0 ? 2 * v - 1 : -2 * v; }

bool lattice_less(const LatticePoint& x, const LatticePoint& y) {
  int sx = sup_norm(x), sy = sup_norm(y);
  if (sx != sy) return sx < sy;
  long ex = x.squaredNorm(), ey = y.squaredNorm();
  if (ex != ey) return ex < ey;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    int rx = coordinate_rank(x(i)), ry = coordinate_rank(y(i));
    if (rx != ry) return rx < ry;
  }
  return false;
}

}  // namespace

std::vector<LatticePoint> lattice_ball(int rank, int bound) {
  std::vector<LatticePoint> out;
  LatticePoint a = LatticePoint::Constant(rank, -bound);
  for (;;) {
    out.push_back(a);
    int i = 0;
    for (; i < rank; ++i) {
      if (a(i) < bound) {
        ++a(i);
        break;
      }
      a(i) = -bound;
    }
    if (i == rank) break;
  }
  std::sort(out.begin(), out.end(), lattice_less);
  return out;
}

bool is_hyperbolic(const IntMatrix& m, double tol) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m.cast<double>(), false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(std::abs(es.eigenvalues()(i)) - 1.0) <= tol) return false;
  return true;
}

ActionReport validate_action(const GeneratorSet& gens, int witness_bound) {
  ActionReport report;
  const int k = gens.rank();
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      IntMatrix ab = multiply_checked(gens.generator(i), gens.generator(j));
      IntMatrix ba = multiply_checked(gens.generator(j), gens.generator(i));
      if (ab != ba) {
        Eigen::Index r = 0, c = 0;
        (ab - ba).cwiseAbs().maxCoeff(&r, &c);
        throw Error(ErrorKind::NonCommuting,
                    "generators " + std::to_string(i) + " and " + std::to_string(j) + " differ at entry (" +
                        std::to_string(r) + "," + std::to_string(c) + ")",
                    {i, j, static_cast<long long>(r), static_cast<long long>(c)});
      }
    }
  report.commuting = true;
  for (int j = 0; j < k; ++j) {
    BigInt det = determinant(gens.generator(j));
    if (det != 1 && det != -1)
      throw Error(ErrorKind::NotUnimodular, "generator " + std::to_string(j) + " has determinant " + det.str(), {j});
  }
  report.unimodular = true;
  for (const auto& a : lattice_ball(k, witness_bound)) {
    if (sup_norm(a) == 0) continue;
    if (is_hyperbolic(gens.element(a))) report.anosov_witnesses.push_back(a);
  }
  if (report.anosov_witnesses.empty())
    throw Error(ErrorKind::NoAnosovWitness, "no hyperbolic element with sup-norm <= " + std::to_string(witness_bound),
                {witness_bound});
  report.spectrum = lyapunov_spectrum(gens);
  return report;
}

namespace {

std::vector<cplx> polynomial_roots(const RationalPoly& q) {
  const int n = static_cast<int>(q.size()) - 1;
  std::vector<long double> coef(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) coef[i] = static_cast<long double>(q[i]);
  if (n == 1) return {cplx(static_cast<double>(-coef[0]), 0.0)};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -static_cast<double>(coef[i]);
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  std::vector<cplx> roots;
  for (int r = 0; r < n; ++r) {
    cplxl z(es.eigenvalues()(r).real(), es.eigenvalues()(r).imag());
    for (int it = 0; it < 8; ++it) {
      cplxl p = coef[n], dp = 0;
      for (int i = n - 1; i >= 0; --i) {
        dp = dp * z + p;
        p = p * z + coef[i];
      }
      if (std::abs(dp) == 0.0L) break;
      cplxl step = p / dp;
      z -= step;
      if (std::abs(step) <= 1e-19L * (1.0L + std::abs(z))) break;
    }
    cplx zd(static_cast<double>(z.real()), static_cast<double>(z.imag()));
    if (std::abs(zd.imag()) < 1e-14 * (1.0 + std::abs(zd))) zd.imag(0.0);
    roots.push_back(zd);
  }
  return roots;
}

Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& m, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const Eigen::Index n = m.cols();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

struct JointNode {
  Eigen::MatrixXcd basis;
  std::vector<cplx> eigenvalues;
};

}  // namespace

LyapunovSpectrum lyapunov_spectrum(const GeneratorSet& gens) {
  const int d = gens.dimension();
  const int k = gens.rank();
  std::vector<std::vector<cplx>> roots(k);
  for (int j = 0; j < k; ++j) {
    RationalPoly p = to_rational_poly(characteristic_polynomial(gens.generator(j)));
    RationalPoly q = squarefree_part(p);
    if (!polynomial_annihilates(q, gens.generator(j)))
      throw Error(ErrorKind::NonSemisimple, "generator " + std::to_string(j) + " is not semisimple", {j});
    roots[j] = polynomial_roots(q);
  }

  std::vector<JointNode> nodes{{Eigen::MatrixXcd::Identity(d, d), {}}};
  for (int j = 0; j < k; ++j) {
    const Eigen::MatrixXcd a = gens.generator(j).cast<double>().cast<cplx>();
    const double tol = 1e-8 * (1.0 + a.cwiseAbs().maxCoeff());
    std::vector<JointNode> next;
    for (const auto& node : nodes)
      for (const auto& mu : roots[j]) {
        Eigen::MatrixXcd shifted = (a - mu * Eigen::MatrixXcd::Identity(d, d)) * node.basis;
        Eigen::MatrixXcd ns = null_space(shifted, tol);
        if (ns.cols() == 0) continue;
        JointNode child{node.basis * ns, node.eigenvalues};
        child.eigenvalues.push_back(mu);
        next.push_back(std::move(child));
      }
    nodes = std::move(next);
  }
  int total = 0;
  for (const auto& n : nodes) total += static_cast<int>(n.basis.cols());
  if (total != d)
    throw Error(ErrorKind::SpectrumAmbiguous,
                "joint eigenspaces have total dimension " + std::to_string(total) + ", expected " + std::to_string(d));

  std::vector<Eigen::VectorXd> functionals;
  std::vector<std::vector<int>> groups;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    Eigen::VectorXd chi(k);
    for (int j = 0; j < k; ++j) chi(j) = std::log(std::abs(nodes[n].eigenvalues[j]));
    bool placed = false;
    for (std::size_t g = 0; g < functionals.size(); ++g) {
      double gap = (functionals[g] - chi).cwiseAbs().maxCoeff();
      if (gap < 1e-9) {
        groups[g].push_back(static_cast<int>(n));
        placed = true;
        break;
      }
      if (gap < 1e-7)
        throw Error(ErrorKind::SpectrumAmbiguous, "functionals separated by less than working precision");
    }
    if (!placed) {
      functionals.push_back(chi);
      groups.push_back({static_cast<int>(n)});
    }
  }

  LyapunovSpectrum spectrum;
  spectrum.dimension = d;
  spectrum.rank = k;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    int cdim = 0;
    for (int n : groups[g]) cdim += static_cast<int>(nodes[n].basis.cols());
    Eigen::MatrixXcd w(d, cdim);
    int col = 0;
    for (int n : groups[g]) {
      w.middleCols(col, nodes[n].basis.cols()) = nodes[n].basis;
      col += static_cast<int>(nodes[n].basis.cols());
    }
    Eigen::MatrixXd realified(d, 2 * cdim);
    realified << w.real(), w.imag();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(realified, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > 1e-8 * s(0)) ++rank;
    if (rank != cdim)
      throw Error(ErrorKind::SpectrumAmbiguous, "real form of a Lyapunov space has the wrong dimension");
    LyapunovSpace space;
    space.functional = functionals[g];
    space.basis = svd.matrixU().leftCols(rank);
    for (Eigen::Index c = 0; c < space.basis.cols(); ++c) {
      Eigen::Index pivot = 0;
      space.basis.col(c).cwiseAbs().maxCoeff(&pivot);
      if (space.basis(pivot, c) < 0) space.basis.col(c) *= -1.0;
    }
    for (int j = 0; j < k; ++j)
      space.restrictions.push_back(space.basis.transpose() * gens.generator(j).cast<double>() * space.basis);
    Eigen::JacobiSVD<Eigen::MatrixXcd> wsvd(w);
    space.condition = wsvd.singularValues()(0) / wsvd.singularValues()(cdim - 1);
    spectrum.spaces.push_back(std::move(space));
  }
  std::sort(spectrum.spaces.begin(), spectrum.spaces.end(), [](const LyapunovSpace& x, const LyapunovSpace& y) {
    for (Eigen::Index j = 0; j < x.functional.size(); ++j)
      if (x.functional(j) != y.functional(j)) return x.functional(j) > y.functional(j);
    return false;
  });
  return spectrum;
}

LyapunovSpectrum LyapunovSpectrum::from_functionals(const std::vector<Eigen::VectorXd>& functionals,
                                                    const std::vector<int>& dims) {
  LyapunovSpectrum s;
  s.rank = functionals.empty() ? 0 : static_cast<int>(functionals[0].size());
  for (std::size_t i = 0; i < functionals.size(); ++i) {
    LyapunovSpace space;
    space.functional = functionals[i];
    int di = dims.empty() ? 1 : dims[i];
    space.basis = Eigen::MatrixXd::Zero(0, di);
    s.spaces.push_back(std::move(space));
  }
  return s;
}

Eigen::VectorXd LyapunovSpectrum::weighted_sum() const {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(rank);
  for (const auto& s : spaces) sum += s.dim() * s.functional;
  return sum;
}

Eigen::MatrixXd LyapunovSpectrum::full_basis() const {
  Eigen::MatrixXd b(dimension, dimension);
  int col = 0;
  for (const auto& s : spaces) {
    b.middleCols(col, s.dim()) = s.basis;
    col += s.dim();
  }
  return b;
}

Eigen::MatrixXd LyapunovSpectrum::unstable_basis(const LatticePoint& a) const {
  std::vector<const LyapunovSpace*> chosen;
  int cols = 0;
  for (const auto& s : spaces)
    if (s.value(a) > 0) {
      chosen.push_back(&s);
      cols += s.dim();
    }
  Eigen::MatrixXd raw(dimension, cols);
  int col = 0;
  for (const auto* s : chosen) {
    raw.middleCols(col, s->dim()) = s->basis;
    col += s->dim();
  }
  if (cols == 0) return raw;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  return qr.householderQ() * Eigen::MatrixXd::Identity(dimension, cols);
}

double LyapunovSpectrum::min_positive_exponent(const LatticePoint& a) const {
  double best = INFINITY;
  for (const auto& s : spaces) {
    double v = s.value(a);
    if (v > 0) best = std::min(best, v);
  }
  return best;
}

double LyapunovSpectrum::adapted_unstable_inverse_norm(const LatticePoint& a) const {
  return std::exp(-min_positive_exponent(a));
}

Eigen::MatrixXd restricted_element(const LyapunovSpace& space, const LatticePoint& a) {
  const int m = space.dim();
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(m, m);
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (a(j) == 0) continue;
    Eigen::MatrixXd g = a(j) > 0 ? space.restrictions[j] : Eigen::MatrixXd(space.restrictions[j].inverse());
    for (int s = 0; s < std::abs(a(j)); ++s) r = g * r;
  }
  return r;
}

GrowthConstants growth_constants(LyapunovSpectrum& spectrum, const GeneratorSet& gens, int sample_bound,
                                 std::uint64_t seed, int vectors_per_space) {
  (void)gens;
  GrowthConstants out;
  double kappa = 1.0;
  for (const auto& s : spectrum.spaces) kappa = std::max(kappa, s.condition);
  out.C = kappa * (1.0 + 1e-6);
  out.L = 0.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (const auto& a : lattice_ball(spectrum.rank, sample_bound)) {
    const double norm_a = a.cast<double>().norm();
    const double poly = norm_a > 0 ? std::pow(norm_a, out.L) : 1.0;
    for (int i = 0; i < spectrum.size(); ++i) {
      const auto& space = spectrum.spaces[i];
      Eigen::MatrixXd r = restricted_element(space, a);
      const double growth = std::exp(space.value(a));
      for (int v = 0; v < vectors_per_space; ++v) {
        Eigen::VectorXd c(space.dim());
        for (int t = 0; t < c.size(); ++t) c(t) = normal(rng);
        c.normalize();
        const double img = (r * c).norm();
        const double lower = growth / out.C / img;
        const double upper = img / (out.C * poly * growth);
        out.worst_lower = std::max(out.worst_lower, lower);
        out.worst_upper = std::max(out.worst_upper, upper);
        ++out.samples;
        if (!(lower < 1.0) || !(upper < 1.0)) {
          std::vector<long long> payload(a.data(), a.data() + a.size());
          payload.push_back(i);
          throw Error(ErrorKind::BoundViolated, "growth bound fails for Lyapunov space " + std::to_string(i), payload);
        }
      }
    }
  }
  spectrum.growth_constant = out.C;
  spectrum.deviation_exponent = out.L;
  return out;
}

double derivative_norm(const GeneratorSet& gens, const LatticePoint& a, const Eigen::MatrixXd& subspace,
                       bool inverted) {
  if (subspace.rows() != gens.dimension() || subspace.cols() == 0)
    throw Error(ErrorKind::InvalidInput, "subspace has wrong shape");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(subspace);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(subspace.rows(), subspace.cols());
  LyapunovSpace space;
  space.basis = q;
  for (int j = 0; j < gens.rank(); ++j) {
    Eigen::MatrixXd aj = gens.generator(j).cast<double>();
    Eigen::MatrixXd rj = q.transpose() * aj * q;
    double leak = (aj * q - q * rj).norm();
    if (leak > 1e-8 * (1.0 + aj.norm()))
      throw Error(ErrorKind::NotInvariant, "subspace is not invariant under generator " + std::to_string(j), {j});
    space.restrictions.push_back(rj);
  }
  Eigen::MatrixXd r = restricted_element(space, a);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
  const auto& s = svd.singularValues();
  return inverted ? 1.0 / s(s.size() - 1) : s(0);
}

}  // namespace toralrig
