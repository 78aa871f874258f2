// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <random>

#include "corpus.hpp"
#include "oracles.hpp"
#include "toralrig/error.hpp"
#include "toralrig/holonomy.hpp"

using namespace toralrig;
using namespace toralrig::testing;

namespace {

GeneratorSet cubic_pair() { return GeneratorSet({cubic_a(), cubic_b()}); }

const LyapunovSpectrum& spectrum() {
  static const LyapunovSpectrum s = lyapunov_spectrum(cubic_pair());
  return s;
}

const FourierField& phi() {
  static const FourierField f = sine_product_field(3, 0.05);
  return f;
}

CircleCocycle conjugated(double theta) {
  return coboundary_construct(phi(), {CircleMap::rotation(theta), CircleMap::rotation(theta)}, cubic_pair());
}

const CircleCocycle& fixture() {
  static const CircleCocycle beta = conjugated(0.0);
  return beta;
}

CircleDiffeo phi_at(const Eigen::VectorXd& x) {
  const long double z[3] = {x(0), x(1), x(2)};
  return CircleDiffeo(phi().at(z));
}

LatticePoint point(int a, int b) {
  LatticePoint p(2);
  p << a, b;
  return p;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidInput;
}

// Integer coordinates of v in the lattice spanned by the columns of basis, if any.
bool in_lattice(const IntMatrix& basis, const Eigen::VectorXd& v) {
  const Eigen::VectorXd c = basis.cast<double>().fullPivLu().solve(v);
  return (c - c.array().round().matrix()).norm() < 1e-9 && (basis.cast<double>() * c - v).norm() < 1e-9;
}

}  // namespace

TEST(CoverLattice, KnownIndices) {
  EXPECT_EQ(cover_lattice(GeneratorSet({cat_map()})).index, BigInt(1));
  EXPECT_EQ(cover_lattice(GeneratorSet({cubic_a()})).index, BigInt(3));
  EXPECT_EQ(cover_lattice(GeneratorSet({cubic_b()})).index, BigInt(1));
  EXPECT_EQ(cover_lattice(cubic_pair()).index, stacked_index({cubic_a(), cubic_b()}));
}

TEST(CoverLattice, MatchesStackedOracleOnCorpus) {
  for (const auto& e : action_corpus()) {
    const GeneratorSet g(e.generators);
    const BigInt oracle = stacked_index(e.generators);
    if (oracle == 0) {
      EXPECT_EQ(kind_of([&] { cover_lattice(g); }), ErrorKind::DegenerateLattice) << e.name;
      continue;
    }
    const CoverLattice c = cover_lattice(g);
    EXPECT_EQ(c.index, oracle) << e.name;
    BigInt det = determinant(c.basis);
    if (det < 0) det = -det;
    EXPECT_EQ(det, c.index) << e.name;
    for (const auto& m : e.generators) {
      const IntMatrix s = m - IntMatrix::Identity(m.rows(), m.cols());
      for (int col = 0; col < s.cols(); ++col)
        EXPECT_TRUE(in_lattice(c.basis, s.col(col).cast<double>())) << e.name;
    }
  }
}

TEST(CoverLattice, RankDeficientStackRejected) {
  const IntMatrix i2 = IntMatrix::Identity(2, 2);
  try {
    cover_lattice(GeneratorSet({block_diag(cat_map(), i2)}));
    ADD_FAILURE() << "expected DegenerateLattice";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateLattice);
    EXPECT_EQ(e.payload(), std::vector<long long>{2});
  }
}

TEST(UnstableHolonomy, CoboundaryLimitIsConjugacyQuotient) {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0), w(-0.3, 0.3);
  for (const LatticePoint& a : {point(1, 0), point(1, 1), point(0, -1)}) {
    const Eigen::MatrixXd U = spectrum().unstable_basis(a);
    for (int t = 0; t < 5; ++t) {
      Eigen::VectorXd p(3);
      for (int i = 0; i < 3; ++i) p(i) = u(rng);
      Eigen::VectorXd c(U.cols());
      for (int i = 0; i < c.size(); ++i) c(i) = w(rng);
      const Eigen::VectorXd q = p + U * c;
      const HolonomyResult h = unstable_holonomy(fixture(), spectrum(), a, p, q, 1e-11, 200);
      CircleDiffeo expect = phi_at(p).inverse();
      expect.append(phi_at(q));
      EXPECT_LT(c0_distance(h.map, expect), 1e-9) << a.transpose();
      EXPECT_LT(h.rho_predicted, 1.0);
      EXPECT_LE(h.error_bound, 1e-9);
    }
  }
}

TEST(UnstableHolonomy, RotationConjugatedHasSameLimit) {
  const CircleCocycle beta = conjugated(0.3);
  const LatticePoint a = point(1, 0);
  const Eigen::MatrixXd U = spectrum().unstable_basis(a);
  Eigen::VectorXd p(3);
  p << 0.1, 0.5, 0.8;
  const Eigen::VectorXd q = p + 0.2 * U.col(0) - 0.1 * U.col(1);
  const HolonomyResult h = unstable_holonomy(beta, spectrum(), a, p, q, 1e-11, 200);
  CircleDiffeo expect = phi_at(p).inverse();
  expect.append(phi_at(q));
  EXPECT_LT(c0_distance(h.map, expect), 1e-9);
}

TEST(UnstableHolonomy, RejectsPointsOffTheLeaf) {
  const LatticePoint a = point(1, 0);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(3), q = p;
  for (int i = 0; i < 3; ++i)
    if (spectrum().spaces[i].value(a) < 0) q += 0.1 * spectrum().spaces[i].basis.col(0);
  EXPECT_EQ(kind_of([&] { unstable_holonomy(fixture(), spectrum(), a, p, q, 1e-10, 100); }),
            ErrorKind::NotOnUnstableLeaf);
}

TEST(UnstableHolonomy, FittedRateNearPrediction) {
  const LatticePoint a = point(1, 0);
  const Eigen::MatrixXd U = spectrum().unstable_basis(a);
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0), w(-0.4, 0.4);
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd p(3);
    for (int i = 0; i < 3; ++i) p(i) = u(rng);
    const Eigen::VectorXd q = p + U * Eigen::Vector2d(w(rng), w(rng));
    const HolonomyResult h = unstable_holonomy(fixture(), spectrum(), a, p, q, 1e-12, 200);
    const double rate = fitted_rate(h.deltas);
    EXPECT_LT(std::abs(rate - h.rho_predicted) / h.rho_predicted, 0.2) << "pair " << t;
  }
}

TEST(FittedRate, GeometricSequences) {
  std::vector<double> d;
  for (int n = 0; n < 20; ++n) d.push_back(3.0 * std::pow(0.6, n));
  EXPECT_NEAR(fitted_rate(d), 0.6, 1e-12);
  d.push_back(1e-15);
  d.push_back(1e-15);
  EXPECT_NEAR(fitted_rate(d), 0.6, 1e-12);
  EXPECT_TRUE(std::isnan(fitted_rate({1e-16})));
}

class TransferTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dec_ = new WeylChamberDecomposition(chambers(spectrum(), 10));
    cover_ = new CoverLattice(cover_lattice(cubic_pair()));
    plan_ = new TransferPlan(plan_transfer(fixture(), spectrum(), *dec_, 1e-8, {16, 64}, 4));
    h_ = new TransferMap(transfer_map(fixture(), *plan_, *cover_, {16, 32}, 50, 13));
  }
  static void TearDownTestSuite() {
    delete dec_;
    delete cover_;
    delete plan_;
    delete h_;
  }
  static WeylChamberDecomposition* dec_;
  static CoverLattice* cover_;
  static TransferPlan* plan_;
  static TransferMap* h_;
};

WeylChamberDecomposition* TransferTest::dec_ = nullptr;
CoverLattice* TransferTest::cover_ = nullptr;
TransferPlan* TransferTest::plan_ = nullptr;
TransferMap* TransferTest::h_ = nullptr;

TEST_F(TransferTest, PlanCoversEveryCoarseClass) {
  EXPECT_EQ(plan_->legs.size(), dec_->classes.size());
  for (const auto& leg : plan_->legs) {
    EXPECT_LT(leg.rho, 1.0);
    EXPECT_GE(leg.steps, 2);
  }
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd frame(3, 3);
  int col = 0;
  for (const auto& leg : plan_->legs) {
    frame.middleCols(col, leg.basis.cols()) = leg.basis;
    col += static_cast<int>(leg.basis.cols());
  }
  EXPECT_LT((plan_->coordinates * frame - id).norm(), 1e-12);
}

TEST_F(TransferTest, IdentityAtOriginAndValidMaps) {
  for (int j = 0; j < h_->fiber; ++j) EXPECT_EQ(h_->displacement[j], 0.0);
  for (std::size_t n = 0; n < h_->nodes(); n += 97) EXPECT_GT(h_->node_map(n).min_derivative_bound(), 0.0);
}

TEST_F(TransferTest, RecoversGeneratingConjugacy) {
  double worst = 0.0;
  for (std::size_t n = 0; n < h_->nodes(); ++n)
    worst = std::max(worst, c0_distance(CircleDiffeo(h_->node_map(n)), phi_at(h_->node_point(n)), 64));
  EXPECT_LT(worst, 1e-7);
}

TEST_F(TransferTest, PathOrderIndependence) {
  EXPECT_LT(h_->path_defect, 1e-7);
  EXPECT_LT(h_->truncation_defect, 1e-7);
  Eigen::VectorXd x(3);
  x << 0.31, 0.62, 0.17;
  std::vector<double> up(8), down(8);
  for (int j = 0; j < 8; ++j) up[j] = down[j] = j / 8.0;
  apply_transfer(fixture(), *plan_, x, up, false);
  apply_transfer(fixture(), *plan_, x, down, true);
  for (int j = 0; j < 8; ++j) EXPECT_NEAR(up[j], down[j], 1e-7);
}

TEST_F(TransferTest, ReductionAndCoboundary) {
  const ConstantReduction red = reduce_to_constant(fixture(), *h_, 30);
  EXPECT_LT(red.defect, 1e-7);
  for (const auto& b0 : red.beta0) EXPECT_LT(distance_from_identity(b0), 1e-7);
  const CoboundaryReport cb = coboundary_verify(fixture(), *plan_, *h_, *cover_, 30);
  EXPECT_LT(cb.periodicity_defect, 1e-7);
  EXPECT_LT(cb.identity_residual, 1e-7);
  EXPECT_EQ(cb.samples, 31u);
}

TEST_F(TransferTest, InterpolatedMapMatchesConjugacyOffGrid) {
  std::mt19937 rng(47);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd x(3);
    for (int i = 0; i < 3; ++i) x(i) = u(rng);
    EXPECT_LT(c0_distance(CircleDiffeo(h_->map_at(x)), phi_at(x), 64), 1e-4);
  }
}

TEST_F(TransferTest, DumpRoundTripsBitIdentically) {
  const auto path = std::filesystem::temp_directory_path() / "toralrig_transfer_test.bin";
  save_transfer(*h_, path.string());
  const TransferMap back = load_transfer(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(back.displacement, h_->displacement);
  EXPECT_EQ(back.lattice, h_->lattice);
  EXPECT_EQ(back.base, h_->base);
  EXPECT_EQ(back.fiber, h_->fiber);
  EXPECT_EQ(back.dimension, h_->dimension);
  EXPECT_EQ(back.path_defect, h_->path_defect);
  EXPECT_EQ(back.truncation_defect, h_->truncation_defect);
}

TEST_F(TransferTest, RotationFixtureIsNotFixedPointTrivial) {
  const CircleCocycle beta = conjugated(0.3);
  const TransferPlan plan = plan_transfer(beta, spectrum(), *dec_, 1e-8, {16, 64}, 4);
  const TransferMap h = transfer_map(beta, plan, *cover_, {16, 16}, 10, 13);
  const ConstantReduction red = reduce_to_constant(beta, h, 20);
  EXPECT_LT(red.defect, 1e-7);
  for (const auto& r : red.rotation) EXPECT_NEAR(r.value, 0.3, 1e-6);
  try {
    coboundary_verify(beta, plan, h, *cover_, 10);
    ADD_FAILURE() << "expected NotFixedPointTrivial";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotFixedPointTrivial);
    EXPECT_EQ(e.payload(), std::vector<long long>{0});
  }
}

TEST(PlanTransfer, RequiresFullAction) {
  const IntMatrix c = cat_map(), i2 = IntMatrix::Identity(2, 2);
  const GeneratorSet g({block_diag(c, i2), block_diag(i2, c)});
  const LyapunovSpectrum s = lyapunov_spectrum(g);
  EXPECT_EQ(kind_of([&] { plan_transfer(identity_cocycle(g), s, chambers(s, 10), 1e-8); }), ErrorKind::StageRefused);
}

TEST(PeriodicObstruction, CountsMatchEigenvalueProducts) {
  for (int gen = 0; gen < 2; ++gen) {
    const LatticePoint a = gen == 0 ? point(1, 0) : point(0, 1);
    const auto rows = periodic_obstruction(fixture(), a, 6);
    ASSERT_EQ(rows.size(), 6u);
    for (int n = 1; n <= 6; ++n) {
      double oracle = 1.0;
      for (int i = 0; i < 3; ++i) {
        const double lambda = gen == 0 ? cubic_root(i) : cubic_root(i) * cubic_root(i) - 2.0;
        oracle *= std::abs(std::pow(lambda, n) - 1.0);
      }
      EXPECT_EQ(rows[n - 1].points, static_cast<std::size_t>(std::llround(oracle))) << "period " << n;
      EXPECT_EQ(rows[n - 1].entries.size(), rows[n - 1].points);
      EXPECT_LT(rows[n - 1].max_distance_from_zero, 1e-8);
    }
  }
}

TEST(PeriodicObstruction, ConstantRotationAccumulates) {
  const CircleCocycle beta = constant_rotations(cubic_pair(), {0.3, 0.3});
  for (const LatticePoint& a : {point(1, 0), point(1, 1)}) {
    const auto rows = periodic_obstruction(beta, a, 4);
    const double total = 0.3 * static_cast<double>(a.sum());
    for (const auto& row : rows)
      for (const auto& e : row.entries)
        EXPECT_LT(std::abs(circle_difference(e.rotation, row.period * total)), 1e-9);
  }
}

TEST(PeriodicObstruction, NonHyperbolicElementRejected) {
  const IntMatrix c = cat_map(), i2 = IntMatrix::Identity(2, 2);
  const GeneratorSet g({block_diag(c, i2), block_diag(i2, c)});
  EXPECT_EQ(kind_of([&] { periodic_obstruction(identity_cocycle(g), point(1, 0), 2); }), ErrorKind::InvalidInput);
}
