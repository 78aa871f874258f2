// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <string>

#include "toralrig/config.hpp"
#include "toralrig/pipeline.hpp"

using namespace toralrig;
using nlohmann::json;

namespace {

RunConfig load(const std::string& name) { return parse_config_file(std::string(TORALRIG_TEST_DATA) + "/" + name); }

const char* kLargeSine = R"(
[action]
generators = [
  [[0, 0, 1], [1, 0, 3], [0, 1, 0]],
  [[-2, 1, 0], [0, 1, 1], [1, 0, 1]],
]

[cocycle]
kind = "coboundary"
phi = { recipe = "sine_product", eps = 0.9 }
)";

}  // namespace

TEST(Pipeline, AnalyzeCubic) {
  const RunOutput out = run_command(Command::Analyze, load("cubic.toml"));
  EXPECT_EQ(out.exit_code, kExitOk);
  EXPECT_EQ(out.report["schema"], kReportSchema);
  EXPECT_EQ(out.report["status"], "ok");
  EXPECT_EQ(out.report["weyl"]["chamber_count"], 6);
  EXPECT_EQ(out.report["weyl"]["max_chamber_count"], 6);
  for (const char* flag : {"maximal", "cartan", "tns", "full", "resonance_free"})
    EXPECT_TRUE(out.report["predicates"][flag].get<bool>()) << flag;
  EXPECT_NE(out.svg.find("<svg"), std::string::npos);
}

TEST(Pipeline, IdentityHasNoAnosovWitness) {
  const RunOutput out = run_command(Command::Analyze, load("identity.toml"));
  EXPECT_EQ(out.exit_code, kExitFailed);
  EXPECT_EQ(out.report["error"]["stage"], "analyze");
  EXPECT_EQ(out.report["error"]["kind"], "NoAnosovWitness");
  EXPECT_TRUE(out.svg.empty());
}

TEST(Pipeline, RigidityRefusesNonTnsAction) {
  const RunOutput out = run_command(Command::Rigidity, load("catmap_product.toml"));
  EXPECT_EQ(out.exit_code, kExitRefused);
  EXPECT_EQ(out.report["error"]["kind"], "StageRefused");
  EXPECT_FALSE(out.report["predicates"]["tns"].get<bool>());
  EXPECT_FALSE(out.report.contains("rigidity"));
}

TEST(Pipeline, CertifySineCocycle) {
  const RunOutput out = run_command(Command::Certify, load("sine.toml"));
  EXPECT_EQ(out.exit_code, kExitOk);
  const json& c = out.report["certify"];
  EXPECT_TRUE(c["passed"].get<bool>());
  EXPECT_TRUE(c["ph_probe"]["all_certified"].get<bool>());
  EXPECT_EQ(c["bunching"]["k"], 1);
  EXPECT_LE(c["bunching"]["margin"].get<double>(), 0.72141);
  EXPECT_FALSE(c["fixed_point_trivial"]["trivial"].get<bool>());
}

TEST(Pipeline, LargePerturbationFailsCertificationAndBlocksRigidity) {
  const RunConfig cfg = parse_config_string(kLargeSine);
  const RunOutput cert = run_command(Command::Certify, cfg);
  EXPECT_EQ(cert.exit_code, kExitFailed);
  EXPECT_FALSE(cert.report["certify"]["passed"].get<bool>());
  const RunOutput rig = run_command(Command::Rigidity, cfg);
  EXPECT_EQ(rig.exit_code, kExitRefused);
  EXPECT_EQ(rig.report["error"]["stage"], "rigidity");
}

TEST(Pipeline, ReportsAreDeterministic) {
  RunConfig cfg = load("sine.toml");
  const std::string a = run_command(Command::Certify, cfg).report.dump();
  const std::string b = run_command(Command::Certify, cfg).report.dump();
  EXPECT_EQ(a, b);
  cfg.seed = 99;
  const json c = run_command(Command::Certify, cfg).report;
  EXPECT_EQ(c["seed"], 99);
}

TEST(Pipeline, CoboundaryRigidity) {
  const RunOutput out = run_command(Command::Rigidity, load("coboundary.toml"));
  ASSERT_EQ(out.exit_code, kExitOk) << out.report.dump(2);
  const json& r = out.report["rigidity"];
  EXPECT_TRUE(r["within_tolerance"].get<bool>());
  EXPECT_FALSE(r["forced"].get<bool>());
  EXPECT_EQ(r["cover_lattice"]["index"], "1");
  for (const auto& res : r["residuals"]) {
    EXPECT_TRUE(res["ok"].get<bool>()) << res.dump();
    EXPECT_LT(res["value"].get<double>(), 1e-7) << res.dump();
  }
  EXPECT_TRUE(r["findings"].empty());
  EXPECT_EQ(r["obstruction"].size(), 2u);
}
