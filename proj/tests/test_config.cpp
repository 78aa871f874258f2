// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "corpus.hpp"
#include "toralrig/config.hpp"
#include "toralrig/error.hpp"

using namespace toralrig;
using namespace toralrig::testing;

namespace {

std::string data(const std::string& name) { return std::string(TORALRIG_TEST_DATA) + "/" + name; }

const char* kAction = R"([action]
generators = [
  [[0, 0, 1], [1, 0, 3], [0, 1, 0]],
  [[-2, 1, 0], [0, 1, 1], [1, 0, 1]],
]
)";

Error config_error(const std::string& text) {
  try {
    parse_config_string(text);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "accepted:\n" << text;
  return Error(ErrorKind::InvalidInput, "none");
}

}  // namespace

TEST(Config, CubicFixture) {
  const RunConfig c = parse_config_file(data("cubic.toml"));
  ASSERT_EQ(c.rank(), 2);
  EXPECT_EQ(c.dimension(), 3);
  EXPECT_EQ(c.generators[0], cubic_a());
  EXPECT_EQ(c.generators[1], cubic_b());
  EXPECT_EQ(c.cocycle.kind, CocycleKind::Identity);
  EXPECT_EQ(c.tolerances.tol, 1e-8);
  EXPECT_EQ(c.grids.transfer.base, 16);
  EXPECT_EQ(c.outputs.report, "report.json");
  EXPECT_EQ(c.seed, 1u);
}

TEST(Config, CoboundaryAndCertifyTables) {
  const RunConfig c = parse_config_file(data("rotation.toml"));
  EXPECT_EQ(c.cocycle.kind, CocycleKind::Coboundary);
  EXPECT_EQ(c.cocycle.angles, (std::vector<double>{0.3, 0.3}));
  ASSERT_EQ(c.cocycle.fields.size(), 1u);
  EXPECT_EQ(c.grids.transfer.fiber, 32);
  EXPECT_EQ(c.tolerances.max_period, 3);
  EXPECT_EQ(c.seed, 7u);

  const RunConfig s = parse_config_file(data("sine.toml"));
  ASSERT_TRUE(s.element.has_value());
  EXPECT_EQ((*s.element)(0), 1);
  EXPECT_EQ((*s.element)(1), 0);
  EXPECT_EQ(s.bunching_r, 1.0);
  const RunConfig inf = parse_config_string(std::string(kAction) + "[certify]\nr = \"inf\"\n");
  EXPECT_TRUE(std::isinf(inf.bunching_r));
}

TEST(Config, ExplicitFourierMatchesRecipe) {
  const RunConfig recipe = parse_config_file(data("coboundary.toml"));
  const RunConfig explicit_ = parse_config_file(data("explicit_fourier.toml"));
  const GeneratorSet g(recipe.generators);
  const CircleCocycle a = build_cocycle(recipe, g), b = build_cocycle(explicit_, g);
  EXPECT_FALSE(b.constant());
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> n(-2, 2);
  for (int t = 0; t < 30; ++t) {
    Eigen::VectorXd x(3);
    for (int i = 0; i < 3; ++i) x(i) = u(rng);
    LatticePoint e(2);
    e << n(rng), n(rng);
    EXPECT_LT(c0_distance(a.evaluate(e, x), b.evaluate(e, x)), 1e-12);
  }
}

TEST(Config, ErrorsCarryLineNumbers) {
  const Error unknown = config_error(std::string(kAction) + "\n[grids]\nbase = 16\nbogus = 3\n");
  EXPECT_EQ(unknown.kind(), ErrorKind::Config);
  EXPECT_NE(std::string(unknown.what()).find("line 9"), std::string::npos) << unknown.what();
  EXPECT_NE(std::string(unknown.what()).find("grids.bogus"), std::string::npos);
  EXPECT_EQ(unknown.payload(), std::vector<long long>{9});

  const Error syntax = config_error("[action\n");
  EXPECT_EQ(syntax.kind(), ErrorKind::Config);
  EXPECT_EQ(syntax.payload(), std::vector<long long>{1});
}

TEST(Config, GridResolutionsArePowersOfTwo) {
  for (const char* bad : {"base = 24", "fiber = 8", "transfer_base = 0"}) {
    const Error e = config_error(std::string(kAction) + "[grids]\n" + bad + "\n");
    EXPECT_EQ(e.kind(), ErrorKind::Config);
    EXPECT_NE(std::string(e.what()).find("power of two"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(parse_config_string(std::string(kAction) + "[grids]\nbase = 32\nfiber = 128\n"));
}

TEST(Config, ToleranceRange) {
  for (const char* bad : {"tol = 1e-13", "tol = 1e-3"})
    EXPECT_EQ(config_error(std::string(kAction) + "[tolerances]\n" + bad + "\n").kind(), ErrorKind::Config);
  EXPECT_NO_THROW(parse_config_string(std::string(kAction) + "[tolerances]\ntol = 1e-12\n"));
  EXPECT_NO_THROW(parse_config_string(std::string(kAction) + "[tolerances]\ntol = 1e-4\n"));
}

TEST(Config, StructuralErrors) {
  EXPECT_EQ(config_error("seed = 1\n").kind(), ErrorKind::Config);
  EXPECT_EQ(config_error("[action]\ngenerators = [[[1, 2], [3]]]\n").kind(), ErrorKind::Config);
  EXPECT_EQ(config_error(std::string(kAction) + "[cocycle]\nkind = \"rotations\"\nangles = [0.1]\n").kind(),
            ErrorKind::Config);
  EXPECT_EQ(config_error(std::string(kAction) + "[cocycle]\nkind = \"twisted\"\n").kind(), ErrorKind::Config);
  EXPECT_EQ(config_error(std::string(kAction) + "[certify]\nelement = [1]\n").kind(), ErrorKind::Config);
  EXPECT_EQ(config_error(std::string(kAction) +
                         "[cocycle]\nkind = \"constant\"\nmaps = [{ terms = [[[9], 0.001, 0.0]] }, {}]\n")
                .kind(),
            ErrorKind::Config);
  try {
    parse_config_file(data("missing.toml"));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}
