// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstdint>
#include <string>

#include <json.hpp>

#include "toralrig/toralrig.h"

namespace {

std::string data(const std::string& name) { return std::string(TORALRIG_TEST_DATA) + "/" + name; }

const int64_t kCubic[18] = {0, 0, 1, 1, 0, 3, 0, 1, 0, -2, 1, 0, 0, 1, 1, 1, 0, 1};

}  // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(toralrig_version(), "0.1.0");
  EXPECT_STREQ(toralrig_status_name(TORALRIG_OK), "Ok");
  EXPECT_STREQ(toralrig_status_name(TORALRIG_E_NON_COMMUTING), "NonCommuting");
  EXPECT_STREQ(toralrig_status_name(TORALRIG_E_STAGE_REFUSED), "StageRefused");
  EXPECT_STREQ(toralrig_status_name(TORALRIG_E_NULL_ARGUMENT), "NullArgument");
}

TEST(CApi, ActionQueries) {
  toralrig_action* action = nullptr;
  ASSERT_EQ(toralrig_action_create(3, 2, kCubic, &action), TORALRIG_OK) << toralrig_last_error();
  EXPECT_EQ(toralrig_action_functional_count(action), 3);
  double values[2];
  int dim = 0;
  double sum0 = 0.0, sum1 = 0.0;
  for (int i = 0; i < 3; ++i) {
    ASSERT_EQ(toralrig_action_functional(action, i, values, &dim), TORALRIG_OK);
    EXPECT_EQ(dim, 1);
    sum0 += values[0];
    sum1 += values[1];
  }
  EXPECT_NEAR(sum0, 0.0, 1e-12);
  EXPECT_NEAR(sum1, 0.0, 1e-12);
  EXPECT_EQ(toralrig_action_functional(action, 3, values, &dim), TORALRIG_E_INVALID_INPUT);

  size_t count = 0;
  ASSERT_EQ(toralrig_action_chambers(action, 10, &count), TORALRIG_OK);
  EXPECT_EQ(count, 6u);
  int flags[5] = {0, 0, 0, 0, 0};
  ASSERT_EQ(toralrig_action_predicates(action, 10, flags), TORALRIG_OK);
  for (int f : flags) EXPECT_EQ(f, 1);

  char buf[32];
  ASSERT_EQ(toralrig_action_cover_index(action, buf, sizeof buf), TORALRIG_OK);
  EXPECT_STREQ(buf, "1");
  EXPECT_EQ(toralrig_action_cover_index(action, buf, 1), TORALRIG_E_OVERFLOW);
  toralrig_action_free(action);

  toralrig_action* single = nullptr;
  ASSERT_EQ(toralrig_action_create(3, 1, kCubic, &single), TORALRIG_OK);
  ASSERT_EQ(toralrig_action_cover_index(single, buf, sizeof buf), TORALRIG_OK);
  EXPECT_STREQ(buf, "3");
  toralrig_action_free(single);
}

TEST(CApi, ActionErrors) {
  toralrig_action* action = nullptr;
  const int64_t noncommuting[18] = {0, 0, 1, 1, 0, 3, 0, 1, 0, 0, 1, 0, 0, 0, 1, 1, 3, 0};
  EXPECT_EQ(toralrig_action_create(3, 2, noncommuting, &action), TORALRIG_E_NON_COMMUTING);
  EXPECT_EQ(action, nullptr);
  EXPECT_NE(std::string(toralrig_last_error()).find("NonCommuting"), std::string::npos);
  const int64_t identity[4] = {1, 0, 0, 1};
  EXPECT_EQ(toralrig_action_create(2, 1, identity, &action), TORALRIG_E_NO_ANOSOV_WITNESS);
  EXPECT_EQ(toralrig_action_create(2, 1, nullptr, &action), TORALRIG_E_NULL_ARGUMENT);
  EXPECT_EQ(toralrig_action_create(0, 1, identity, &action), TORALRIG_E_INVALID_INPUT);
  EXPECT_EQ(toralrig_action_functional_count(nullptr), 0);
}

TEST(CApi, ConfigAndRun) {
  toralrig_config* cfg = nullptr;
  ASSERT_EQ(toralrig_config_load(data("cubic.toml").c_str(), &cfg), TORALRIG_OK) << toralrig_last_error();
  EXPECT_STREQ(toralrig_config_report_name(cfg), "report.json");
  EXPECT_STREQ(toralrig_config_diagram_name(cfg), "chambers.svg");
  ASSERT_EQ(toralrig_config_set_seed(cfg, 42), TORALRIG_OK);
  toralrig_report* report = nullptr;
  ASSERT_EQ(toralrig_run(cfg, TORALRIG_ANALYZE, 0, nullptr, &report), TORALRIG_OK);
  EXPECT_EQ(toralrig_report_exit_code(report), 0);
  ASSERT_NE(toralrig_report_svg(report), nullptr);
  const auto j = nlohmann::json::parse(toralrig_report_json(report));
  EXPECT_EQ(j["seed"], 42);
  EXPECT_EQ(j["weyl"]["chamber_count"], 6);
  toralrig_report_free(report);
  EXPECT_EQ(toralrig_run(cfg, static_cast<toralrig_command>(7), 0, nullptr, &report), TORALRIG_E_INVALID_INPUT);
  toralrig_config_free(cfg);
}

TEST(CApi, RefusalIsAReportNotAStatus) {
  toralrig_config* cfg = nullptr;
  ASSERT_EQ(toralrig_config_load(data("catmap_product.toml").c_str(), &cfg), TORALRIG_OK);
  toralrig_report* report = nullptr;
  ASSERT_EQ(toralrig_run(cfg, TORALRIG_RIGIDITY, 0, nullptr, &report), TORALRIG_OK);
  EXPECT_EQ(toralrig_report_exit_code(report), 3);
  const auto j = nlohmann::json::parse(toralrig_report_json(report));
  EXPECT_EQ(j["error"]["kind"], "StageRefused");
  toralrig_report_free(report);
  toralrig_config_free(cfg);
}

TEST(CApi, ConfigErrors) {
  toralrig_config* cfg = nullptr;
  EXPECT_EQ(toralrig_config_parse("[action\n", &cfg), TORALRIG_E_CONFIG);
  EXPECT_EQ(cfg, nullptr);
  EXPECT_NE(std::string(toralrig_last_error()).find("line 1"), std::string::npos);
  EXPECT_EQ(toralrig_config_load("/nonexistent/file.toml", &cfg), TORALRIG_E_IO);
  EXPECT_EQ(toralrig_config_parse(nullptr, &cfg), TORALRIG_E_NULL_ARGUMENT);
  EXPECT_EQ(toralrig_run(nullptr, TORALRIG_ANALYZE, 0, nullptr, nullptr), TORALRIG_E_NULL_ARGUMENT);
  EXPECT_EQ(toralrig_set_threads(-1), TORALRIG_E_INVALID_INPUT);
  EXPECT_EQ(toralrig_set_threads(0), TORALRIG_OK);
}
