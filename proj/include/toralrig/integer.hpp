// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace toralrig {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// Dense row-major matrix of arbitrary-precision integers.
class BigMatrix {
 public:
  BigMatrix() = default;
  BigMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}
  explicit BigMatrix(const IntMatrix& m);

  static BigMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  BigInt& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const BigInt& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  BigMatrix operator*(const BigMatrix& other) const;
  bool operator==(const BigMatrix& other) const;
  bool is_zero() const;
  // Throws Overflow when an entry does not fit in 64 bits.
  IntMatrix to_int() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<BigInt> data_;
};

IntMatrix multiply_checked(const IntMatrix& a, const IntMatrix& b);
IntMatrix identity_matrix(int n);

BigInt determinant(const BigMatrix& m);
BigInt determinant(const IntMatrix& m);

// Inverse of a matrix with determinant ±1, exact.
IntMatrix unimodular_inverse(const IntMatrix& m);

// m^n for n >= 0, or inverse^(-n) for n < 0.
IntMatrix matrix_power(const IntMatrix& m, const IntMatrix& inverse, long n);

// Coefficients c_0..c_n of det(xI - m), lowest degree first.
std::vector<BigInt> characteristic_polynomial(const IntMatrix& m);

// Polynomials over Q, coefficients lowest degree first, no trailing zeros.
using RationalPoly = std::vector<Rational>;

RationalPoly to_rational_poly(const std::vector<BigInt>& coefficients);
RationalPoly poly_derivative(const RationalPoly& p);
void poly_divmod(const RationalPoly& a, const RationalPoly& b, RationalPoly& quotient, RationalPoly& remainder);
RationalPoly poly_gcd(RationalPoly a, RationalPoly b);  // monic
RationalPoly squarefree_part(const RationalPoly& p);    // monic, p / gcd(p, p')

// Exact test q(m) == 0 for a polynomial with integer-valued rational coefficients.
bool polynomial_annihilates(const RationalPoly& q, const IntMatrix& m);

struct SmithForm {
  std::vector<BigInt> divisors;  // nonzero elementary divisors, d_1 | d_2 | ...
  int rank = 0;
  BigMatrix right;  // unimodular R with L * M * R = diag(divisors)
};

SmithForm smith_normal_form(const BigMatrix& m);

// Lower-triangular column basis of the lattice spanned by the columns of m.
BigMatrix column_hermite_basis(const BigMatrix& m);

// All x in [0,1)^d with m x in Z^d, for nonsingular square m; exact rationals.
std::vector<std::vector<Rational>> torus_preimages_of_zero(const IntMatrix& m);

}  // namespace toralrig
