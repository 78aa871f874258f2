// SPDX-License-Identifier: Apache-2.0
#include "toralrig/integer.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <utility>

#include "toralrig/error.hpp"

namespace toralrig {

BigMatrix::BigMatrix(const IntMatrix& m) : BigMatrix(static_cast<int>(m.rows()), static_cast<int>(m.cols())) {
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) (*this)(i, j) = m(i, j);
}

BigMatrix BigMatrix::identity(int n) {
  BigMatrix out(n, n);
  for (int i = 0; i < n; ++i) out(i, i) = 1;
  return out;
}

BigMatrix BigMatrix::operator*(const BigMatrix& other) const {
  if (cols_ != other.rows_) throw Error(ErrorKind::InvalidInput, "matrix shape mismatch in product");
  BigMatrix out(rows_, other.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const BigInt& a = (*this)(i, k);
      if (a == 0) continue;
      for (int j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
    }
  return out;
}

bool BigMatrix::operator==(const BigMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
}

bool BigMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const BigInt& v) { return v == 0; });
}

IntMatrix BigMatrix::to_int() const {
  static const BigInt lo = std::numeric_limits<std::int64_t>::min();
  static const BigInt hi = std::numeric_limits<std::int64_t>::max();
  IntMatrix out(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) {
      const BigInt& v = (*this)(i, j);
      if (v < lo || v > hi) throw Error(ErrorKind::Overflow, "integer matrix entry exceeds 64 bits");
      out(i, j) = static_cast<std::int64_t>(v);
    }
  return out;
}

IntMatrix multiply_checked(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorKind::InvalidInput, "matrix shape mismatch in product");
  IntMatrix out = IntMatrix::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      std::int64_t acc = 0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) {
        std::int64_t term;
        if (__builtin_mul_overflow(a(i, k), b(k, j), &term) || __builtin_add_overflow(acc, term, &acc))
          throw Error(ErrorKind::Overflow, "64-bit overflow in integer matrix product");
      }
      out(i, j) = acc;
    }
  return out;
}

IntMatrix identity_matrix(int n) { return IntMatrix::Identity(n, n); }

BigInt determinant(const BigMatrix& input) {
  // Bareiss fraction-free elimination.
  const int n = input.rows();
  if (n != input.cols()) throw Error(ErrorKind::InvalidInput, "determinant of a non-square matrix");
  if (n == 0) return 1;
  BigMatrix m = input;
  BigInt sign = 1;
  BigInt prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m(k, k) == 0) {
      int swap = -1;
      for (int i = k + 1; i < n; ++i)
        if (m(i, k) != 0) { swap = i; break; }
      if (swap < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(swap, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

BigInt determinant(const IntMatrix& m) { return determinant(BigMatrix(m)); }

IntMatrix unimodular_inverse(const IntMatrix& m) {
  const int n = static_cast<int>(m.rows());
  BigInt det = determinant(m);
  if (det != 1 && det != -1) throw Error(ErrorKind::NotUnimodular, "determinant is " + det.str());
  BigMatrix adj(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      BigMatrix minor(n - 1, n - 1);
      for (int r = 0, rr = 0; r < n; ++r) {
        if (r == j) continue;
        for (int c = 0, cc = 0; c < n; ++c) {
          if (c == i) continue;
          minor(rr, cc) = m(r, c);
          ++cc;
        }
        ++rr;
      }
      BigInt cof = determinant(minor);
      if ((i + j) % 2) cof = -cof;
      adj(i, j) = cof * det;
    }
  return adj.to_int();
}

IntMatrix matrix_power(const IntMatrix& m, const IntMatrix& inverse, long n) {
  const IntMatrix& base = n >= 0 ? m : inverse;
  unsigned long e = n >= 0 ? static_cast<unsigned long>(n) : static_cast<unsigned long>(-n);
  IntMatrix result = identity_matrix(static_cast<int>(m.rows()));
  IntMatrix sq = base;
  while (e) {
    if (e & 1UL) result = multiply_checked(result, sq);
    e >>= 1;
    if (e) sq = multiply_checked(sq, sq);
  }
  return result;
}

std::vector<BigInt> characteristic_polynomial(const IntMatrix& input) {
  // Faddeev-LeVerrier; every division is exact over Z.
  const int n = static_cast<int>(input.rows());
  BigMatrix a(input);
  std::vector<BigInt> c(n + 1);
  c[n] = 1;
  BigMatrix mk(n, n);
  for (int k = 1; k <= n; ++k) {
    BigMatrix next = a * mk;
    for (int i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
    mk = std::move(next);
    BigMatrix am = a * mk;
    BigInt trace = 0;
    for (int i = 0; i < n; ++i) trace += am(i, i);
    c[n - k] = -trace / k;
  }
  return c;
}

namespace {

void trim(RationalPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

RationalPoly make_monic(RationalPoly p) {
  trim(p);
  if (p.empty()) return p;
  Rational lead = p.back();
  for (auto& v : p) v /= lead;
  return p;
}

}  // namespace

RationalPoly to_rational_poly(const std::vector<BigInt>& coefficients) {
  RationalPoly p(coefficients.begin(), coefficients.end());
  trim(p);
  return p;
}

RationalPoly poly_derivative(const RationalPoly& p) {
  RationalPoly out;
  for (std::size_t i = 1; i < p.size(); ++i) out.push_back(p[i] * static_cast<long>(i));
  trim(out);
  return out;
}

void poly_divmod(const RationalPoly& a, const RationalPoly& b, RationalPoly& quotient, RationalPoly& remainder) {
  RationalPoly bb = b;
  trim(bb);
  if (bb.empty()) throw Error(ErrorKind::InvalidInput, "polynomial division by zero");
  remainder = a;
  trim(remainder);
  quotient.assign(remainder.size() >= bb.size() ? remainder.size() - bb.size() + 1 : 0, Rational(0));
  while (remainder.size() >= bb.size() && !remainder.empty()) {
    std::size_t shift = remainder.size() - bb.size();
    Rational f = remainder.back() / bb.back();
    quotient[shift] = f;
    for (std::size_t i = 0; i < bb.size(); ++i) remainder[shift + i] -= f * bb[i];
    remainder.pop_back();
    trim(remainder);
  }
  trim(quotient);
}

RationalPoly poly_gcd(RationalPoly a, RationalPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    RationalPoly q, r;
    poly_divmod(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  return make_monic(a);
}

RationalPoly squarefree_part(const RationalPoly& p) {
  RationalPoly g = poly_gcd(p, poly_derivative(p));
  RationalPoly q, r;
  poly_divmod(p, g, q, r);
  return make_monic(q);
}

bool polynomial_annihilates(const RationalPoly& q, const IntMatrix& m) {
  const int n = static_cast<int>(m.rows());
  BigInt denom = 1;
  for (const auto& c : q) denom = boost::multiprecision::lcm(denom, boost::multiprecision::denominator(c));
  BigMatrix a(m);
  BigMatrix acc(n, n);
  for (auto it = q.rbegin(); it != q.rend(); ++it) {
    acc = acc * a;
    BigInt coef = boost::multiprecision::numerator(*it) * (denom / boost::multiprecision::denominator(*it));
    for (int i = 0; i < n; ++i) acc(i, i) += coef;
  }
  return acc.is_zero();
}

SmithForm smith_normal_form(const BigMatrix& input) {
  BigMatrix a = input;
  const int m = a.rows();
  const int n = a.cols();
  BigMatrix r = BigMatrix::identity(n);
  auto swap_rows = [&](int i, int k) {
    if (i == k) return;
    for (int j = 0; j < n; ++j) std::swap(a(i, j), a(k, j));
  };
  auto swap_cols = [&](int j, int k) {
    if (j == k) return;
    for (int i = 0; i < m; ++i) std::swap(a(i, j), a(i, k));
    for (int i = 0; i < n; ++i) std::swap(r(i, j), r(i, k));
  };
  auto add_col = [&](int target, int source, const BigInt& f) {
    for (int i = 0; i < m; ++i) a(i, target) -= f * a(i, source);
    for (int i = 0; i < n; ++i) r(i, target) -= f * r(i, source);
  };
  auto add_row = [&](int target, int source, const BigInt& f) {
    for (int j = 0; j < n; ++j) a(target, j) -= f * a(source, j);
  };

  SmithForm out;
  int t = 0;
  for (; t < std::min(m, n); ++t) {
    int pi = -1, pj = -1;
    for (int i = t; i < m; ++i)
      for (int j = t; j < n; ++j)
        if (a(i, j) != 0 && (pi < 0 || abs(a(i, j)) < abs(a(pi, pj)))) { pi = i; pj = j; }
    if (pi < 0) break;
    swap_rows(t, pi);
    swap_cols(t, pj);
    for (;;) {
      bool clean = true;
      for (int i = t + 1; i < m; ++i)
        if (a(i, t) != 0) {
          add_row(i, t, a(i, t) / a(t, t));
          if (a(i, t) != 0) clean = false;
        }
      for (int j = t + 1; j < n; ++j)
        if (a(t, j) != 0) {
          add_col(j, t, a(t, j) / a(t, t));
          if (a(t, j) != 0) clean = false;
        }
      if (!clean) {
        int bi = t, bj = t;
        for (int i = t + 1; i < m; ++i)
          if (a(i, t) != 0 && abs(a(i, t)) < abs(a(bi, bj))) { bi = i; bj = t; }
        for (int j = t + 1; j < n; ++j)
          if (a(t, j) != 0 && abs(a(t, j)) < abs(a(bi, bj))) { bi = t; bj = j; }
        swap_rows(t, bi);
        swap_cols(t, bj);
        continue;
      }
      int bad = -1;
      for (int i = t + 1; i < m && bad < 0; ++i)
        for (int j = t + 1; j < n; ++j)
          if (a(i, j) % a(t, t) != 0) { bad = i; break; }
      if (bad < 0) break;
      add_row(t, bad, BigInt(-1));
    }
    if (a(t, t) < 0)
      for (int j = 0; j < n; ++j) a(t, j) = -a(t, j);
    out.divisors.push_back(a(t, t));
  }
  out.rank = t;
  out.right = std::move(r);
  return out;
}

BigMatrix column_hermite_basis(const BigMatrix& input) {
  BigMatrix a = input;
  const int m = a.rows();
  const int n = a.cols();
  int c = 0;
  std::vector<int> pivot_rows;
  for (int i = 0; i < m && c < n; ++i) {
    for (;;) {
      int best = -1;
      for (int j = c; j < n; ++j)
        if (a(i, j) != 0 && (best < 0 || abs(a(i, j)) < abs(a(i, best)))) best = j;
      if (best < 0) break;
      if (best != c)
        for (int r = 0; r < m; ++r) std::swap(a(r, best), a(r, c));
      bool done = true;
      for (int j = c + 1; j < n; ++j)
        if (a(i, j) != 0) {
          BigInt f = a(i, j) / a(i, c);
          for (int r = 0; r < m; ++r) a(r, j) -= f * a(r, c);
          if (a(i, j) != 0) done = false;
        }
      if (done) break;
    }
    if (c < n && a(i, c) != 0) {
      if (a(i, c) < 0)
        for (int r = 0; r < m; ++r) a(r, c) = -a(r, c);
      for (int j = 0; j < c; ++j) {
        BigInt f = a(i, j) / a(i, c);
        if (a(i, j) - f * a(i, c) < 0) f -= 1;
        if (f != 0)
          for (int r = 0; r < m; ++r) a(r, j) -= f * a(r, c);
      }
      pivot_rows.push_back(i);
      ++c;
    }
  }
  BigMatrix basis(m, c);
  for (int r = 0; r < m; ++r)
    for (int j = 0; j < c; ++j) basis(r, j) = a(r, j);
  return basis;
}

std::vector<std::vector<Rational>> torus_preimages_of_zero(const IntMatrix& m) {
  const int d = static_cast<int>(m.rows());
  SmithForm snf = smith_normal_form(BigMatrix(m));
  if (snf.rank < d) throw Error(ErrorKind::InvalidInput, "singular matrix has infinitely many torus preimages");
  std::vector<std::vector<Rational>> out;
  std::vector<BigInt> counter(d, 0);
  for (;;) {
    std::vector<Rational> x(d, Rational(0));
    for (int j = 0; j < d; ++j) {
      Rational tj(counter[j], snf.divisors[j]);
      for (int i = 0; i < d; ++i) x[i] += Rational(snf.right(i, j)) * tj;
    }
    for (auto& v : x) {
      BigInt fl = boost::multiprecision::numerator(v) / boost::multiprecision::denominator(v);
      if (fl * boost::multiprecision::denominator(v) > boost::multiprecision::numerator(v)) fl -= 1;
      v -= Rational(fl);
      if (v < 0) v += 1;
    }
    out.push_back(std::move(x));
    int j = 0;
    for (; j < d; ++j) {
      counter[j] += 1;
      if (counter[j] < snf.divisors[j]) break;
      counter[j] = 0;
    }
    if (j == d) break;
  }
  return out;
}

}  // namespace toralrig
