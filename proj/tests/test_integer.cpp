// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "corpus.hpp"
#include "oracles.hpp"
#include "toralrig/error.hpp"
#include "toralrig/integer.hpp"

using namespace toralrig;
using namespace toralrig::testing;

namespace {

IntMatrix random_matrix(std::mt19937& rng, int d, int bound) {
  std::uniform_int_distribution<int> u(-bound, bound);
  IntMatrix m(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) m(r, c) = u(rng);
  return m;
}

std::vector<std::vector<BigInt>> to_rows(const IntMatrix& m) {
  std::vector<std::vector<BigInt>> rows(m.rows(), std::vector<BigInt>(m.cols()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) rows[r][c] = m(r, c);
  return rows;
}

}  // namespace

TEST(Determinant, MatchesCofactorExpansion) {
  std::mt19937 rng(1);
  for (int t = 0; t < 200; ++t) {
    const int d = 1 + t % 4;
    const IntMatrix m = random_matrix(rng, d, 9);
    EXPECT_EQ(determinant(m), cofactor_determinant(to_rows(m)));
  }
}

TEST(Determinant, KnownValues) {
  const IntMatrix a = cubic_a();
  EXPECT_EQ(determinant(a - IntMatrix::Identity(3, 3)), BigInt(3));
  EXPECT_EQ(determinant(cubic_b() - IntMatrix::Identity(3, 3)), BigInt(1));
  EXPECT_EQ(determinant(cat_map() - IntMatrix::Identity(2, 2)), BigInt(-1));
}

TEST(UnimodularInverse, ProductIsIdentity) {
  for (const auto& m : {cubic_a(), cubic_b(), cat_map(), IntMatrix(cubic_a() * cubic_b())}) {
    const IntMatrix inv = unimodular_inverse(m);
    EXPECT_EQ(m * inv, IntMatrix::Identity(m.rows(), m.cols()));
  }
}

TEST(UnimodularInverse, RejectsNonUnimodular) {
  IntMatrix m(2, 2);
  m << 2, 0, 0, 1;
  EXPECT_THROW(unimodular_inverse(m), Error);
}

TEST(MatrixPower, NegativePowersUseInverse) {
  const IntMatrix a = cubic_a();
  const IntMatrix inv = unimodular_inverse(a);
  EXPECT_EQ(matrix_power(a, inv, 3), a * a * a);
  EXPECT_EQ(matrix_power(a, inv, -2) * (a * a), IntMatrix::Identity(3, 3));
  EXPECT_EQ(matrix_power(a, inv, 0), IntMatrix::Identity(3, 3));
}

TEST(CharacteristicPolynomial, CubicCompanion) {
  const auto p = characteristic_polynomial(cubic_a());
  ASSERT_EQ(p.size(), 4u);
  EXPECT_EQ(p[0], BigInt(-1));
  EXPECT_EQ(p[1], BigInt(-3));
  EXPECT_EQ(p[2], BigInt(0));
  EXPECT_EQ(p[3], BigInt(1));
}

TEST(CharacteristicPolynomial, AnnihilatesMatrix) {
  std::mt19937 rng(2);
  for (int t = 0; t < 50; ++t) {
    const IntMatrix m = random_matrix(rng, 1 + t % 4, 5);
    EXPECT_TRUE(polynomial_annihilates(to_rational_poly(characteristic_polynomial(m)), m));
  }
}

TEST(SquarefreePart, RemovesRepeatedRoots) {
  // (x - 1)^2 (x + 2)
  const RationalPoly p{Rational(2), Rational(-3), Rational(0), Rational(1)};
  const RationalPoly s = squarefree_part(p);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], Rational(-2));
  EXPECT_EQ(s[1], Rational(1));
  EXPECT_EQ(s[2], Rational(1));
}

TEST(SmithNormalForm, DivisorsMatchDeterminantalDivisors) {
  std::mt19937 rng(3);
  for (int t = 0; t < 60; ++t) {
    const int d = 2 + t % 3;
    const IntMatrix m = random_matrix(rng, d, 6);
    const SmithForm s = smith_normal_form(BigMatrix(m));
    BigInt prefix = 1;
    for (int r = 1; r <= d; ++r) {
      const BigInt dd = determinantal_divisor(m, r);
      if (r > s.rank) {
        EXPECT_EQ(dd, BigInt(0));
        continue;
      }
      BigInt di = s.divisors[r - 1];
      if (di < 0) di = -di;
      prefix *= di;
      EXPECT_EQ(prefix, dd) << "rank " << r;
      if (r > 1) EXPECT_EQ(s.divisors[r - 1] % s.divisors[r - 2], BigInt(0));
    }
  }
}

TEST(SmithNormalForm, CubicCompanionMinusIdentity) {
  const SmithForm s = smith_normal_form(BigMatrix(IntMatrix(cubic_a() - IntMatrix::Identity(3, 3))));
  ASSERT_EQ(s.rank, 3);
  EXPECT_EQ(s.divisors[0], BigInt(1));
  EXPECT_EQ(s.divisors[1], BigInt(1));
  EXPECT_EQ(s.divisors[2], BigInt(3));
}

TEST(HermiteBasis, LowerTriangularAndSameLattice) {
  std::mt19937 rng(4);
  for (int t = 0; t < 40; ++t) {
    IntMatrix m(3, 6);
    std::uniform_int_distribution<int> u(-4, 4);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 6; ++c) m(r, c) = u(rng);
    if (determinantal_divisor(m, 3) == 0) continue;
    const BigMatrix h = column_hermite_basis(BigMatrix(m));
    ASSERT_EQ(h.cols(), 3);
    for (int r = 0; r < 3; ++r)
      for (int c = r + 1; c < 3; ++c) EXPECT_EQ(h(r, c), BigInt(0));
    BigInt det = determinant(h);
    if (det < 0) det = -det;
    EXPECT_EQ(det, determinantal_divisor(m, 3));
  }
}

TEST(TorusPreimages, CountsMatchBruteForce) {
  const IntMatrix a = cubic_a(), b = cubic_b();
  const IntMatrix inva = unimodular_inverse(a), invb = unimodular_inverse(b);
  for (int n = 1; n <= 3; ++n) {
    for (const auto& [m, inv] : {std::pair{a, inva}, std::pair{b, invb}}) {
      const IntMatrix p = matrix_power(m, inv, n);
      const IntMatrix s = p - IntMatrix::Identity(3, 3);
      BigInt det = determinant(s);
      if (det < 0) det = -det;
      const long long N = det.convert_to<long long>();
      const auto pts = torus_preimages_of_zero(s);
      EXPECT_EQ(static_cast<long long>(pts.size()), N);
      EXPECT_EQ(brute_fixed_points(p, N), N);
      for (const auto& x : pts) {
        for (int i = 0; i < 3; ++i) {
          Rational v = 0;
          for (int j = 0; j < 3; ++j) v += Rational(s(i, j)) * x[j];
          EXPECT_EQ(denominator(v), BigInt(1));
          EXPECT_GE(x[i], Rational(0));
          EXPECT_LT(x[i], Rational(1));
        }
      }
    }
  }
}

TEST(TorusPreimages, CatMapHasOnlyOrigin) {
  const auto pts = torus_preimages_of_zero(IntMatrix(cat_map() - IntMatrix::Identity(2, 2)));
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0][0], Rational(0));
  EXPECT_EQ(pts[0][1], Rational(0));
}

TEST(MultiplyChecked, DetectsOverflow) {
  IntMatrix m(1, 1);
  m << (std::int64_t{1} << 40);
  EXPECT_THROW(multiply_checked(m, m), Error);
}
