// SPDX-License-Identifier: Apache-2.0
#include "corpus.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "toralrig/lattice_action.hpp"

namespace toralrig::testing {

IntMatrix cubic_a() {
  IntMatrix a(3, 3);
  a << 0, 0, 1, 1, 0, 3, 0, 1, 0;
  return a;
}

IntMatrix cubic_b() {
  const IntMatrix a = cubic_a();
  return a * a - 2 * IntMatrix::Identity(3, 3);
}

IntMatrix cat_map() {
  IntMatrix c(2, 2);
  c << 2, 1, 1, 1;
  return c;
}

IntMatrix companion(const std::vector<long long>& c) {
  const int n = static_cast<int>(c.size());
  IntMatrix m = IntMatrix::Zero(n, n);
  for (int i = 1; i < n; ++i) m(i, i - 1) = 1;
  for (int i = 0; i < n; ++i) m(i, n - 1) = -c[i];
  return m;
}

IntMatrix block_diag(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix m = IntMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

namespace {

// Log moduli of eigenvalues, sorted by the real part of the eigenvalue so that
// elements of the same commutative ring are compared embedding by embedding.
Eigen::VectorXd log_vector(const IntMatrix& m, const IntMatrix& c) {
  // Eigenvectors of c diagonalize every polynomial in c.
  Eigen::EigenSolver<Eigen::MatrixXd> es(c.cast<double>());
  const Eigen::MatrixXcd v = es.eigenvectors();
  const Eigen::MatrixXcd mv = m.cast<double>().cast<std::complex<double>>() * v;
  const int n = static_cast<int>(c.rows());
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    Eigen::Index r = 0;
    v.col(i).cwiseAbs().maxCoeff(&r);
    out(i) = std::log(std::abs(mv(r, i) / v(r, i)));
  }
  return out;
}

}  // namespace

std::vector<IntMatrix> unit_search(const IntMatrix& c, int count, unsigned seed, int bound) {
  const int n = static_cast<int>(c.rows());
  std::vector<IntMatrix> powers{IntMatrix::Identity(n, n)};
  for (int i = 1; i < n; ++i) powers.push_back(powers.back() * c);
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> coef(-bound, bound);
  std::vector<IntMatrix> out;
  Eigen::MatrixXd logs(n, 0);
  for (int attempt = 0; attempt < 200000 && static_cast<int>(out.size()) < count; ++attempt) {
    IntMatrix u = IntMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) u += coef(rng) * powers[i];
    const BigInt det = determinant(u);
    if (det != 1 && det != -1) continue;
    const Eigen::VectorXd l = log_vector(u, c);
    if (l.cwiseAbs().maxCoeff() < 1e-6 || l.cwiseAbs().maxCoeff() > 4.0) continue;
    Eigen::MatrixXd trial(n, logs.cols() + 1);
    trial << logs, l;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(trial);
    if (svd.singularValues().minCoeff() < 1e-3) continue;
    logs = trial;
    out.push_back(u);
  }
  if (static_cast<int>(out.size()) < count) throw std::runtime_error("unit search found too few units");
  return out;
}

std::vector<CorpusAction> action_corpus() {
  const IntMatrix a = cubic_a(), b = cubic_b(), c = cat_map();
  const IntMatrix i2 = IntMatrix::Identity(2, 2);
  const IntMatrix cinv = unimodular_inverse(c);
  std::vector<CorpusAction> out{
      {"cubic pair", {a, b}},
      {"cubic A^2,B", {a * a, b}},
      {"cubic A,B^2", {a, b * b}},
      {"cubic A^2,B^3", {a * a, b * b * b}},
      {"cubic AB,B", {a * b, b}},
      {"cubic A alone", {a}},
      {"cubic B alone", {b}},
      {"cat map", {c}},
      {"cat map squared", {c * c}},
      {"cat product", {block_diag(c, i2), block_diag(i2, c)}},
      {"cat diagonal and antidiagonal", {block_diag(c, c), block_diag(c, cinv)}},
      {"cat C^2+C, C+C^2", {block_diag(c * c, c), block_diag(c, c * c)}},
      {"x^3-x-1 companion", {companion({-1, -1, 0})}},
  };
  const std::vector<std::pair<std::string, std::vector<long long>>> cubics = {
      {"x^3-3x-1", {-1, -3, 0}},
      {"x^3-x^2-2x+1", {1, -2, -1}},
      {"x^3-4x-1", {-1, -4, 0}},
      {"x^3-x^2-3x+1", {1, -3, -1}},
      {"x^3-5x-1", {-1, -5, 0}},
  };
  unsigned seed = 101;
  for (const auto& [name, poly] : cubics) {
    const IntMatrix m = companion(poly);
    for (int rep = 0; rep < 2; ++rep) out.push_back({"units of " + name + " #" + std::to_string(rep), unit_search(m, 2, seed++)});
  }
  out.push_back({"units of x^4-x^3-3x^2+x+1", unit_search(companion({1, 1, -3, -1}), 3, seed++)});
  return out;
}

}  // namespace toralrig::testing
