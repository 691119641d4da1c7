#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "cogsense/radio_model.hpp"

using namespace cogsense;

namespace {

const char* kTable2Config = R"(# reference scenario
f_s_mhz = 1
T_ms = 100
h_p1_gain_db = -100
h_p2_gain_db = -100
h_s_gain_db = -80
sigma_w2_dbm = -100
P_tx_PT_dbm = -10
P_tx_ST_dbm = -10
p_H1 = 0.2
target_pd = 0.9
kappa = 0.05
N_s = 10
N_p2 = 1000
)";

std::string replace_line(std::string text, const std::string& key, const std::string& line) {
  const auto pos = text.find(key);
  const auto end = text.find('\n', pos);
  return text.replace(pos, end - pos, line);
}

}  // namespace

TEST(Derive, Table2ReceivedPower) {
  const Scenario s = table2();
  const DerivedPowers d = derive(s);
  EXPECT_NEAR(d.P_rx_ST / s.sigma_w2, 1.1, 1e-12);
  EXPECT_NEAR(d.P_rx_SR / s.sigma_w2, 1.1, 1e-12);
  EXPECT_NEAR(linear_to_db(d.gamma_p1), -10.0, 1e-9);
  EXPECT_NEAR(linear_to_db(d.gamma_s), 10.0, 1e-9);
}

TEST(Derive, ZeroSensingGain) {
  Scenario s = table2();
  s.h_p1_gain = 0.0;
  const DerivedPowers d = derive(s);
  EXPECT_EQ(d.P_rx_ST, s.sigma_w2);
  EXPECT_EQ(d.gamma_p1, 0.0);
}

TEST(Derive, AccessGainConsistentWithSnr) {
  // gamma_s = 10 dB, P_tx_ST = -10 dBm, sigma_w2 = -100 dBm  =>  |h_s|^2 = -80 dB
  const Scenario s = with_gamma_s_db(table2(), 10.0);
  EXPECT_NEAR(linear_to_db(s.h_s_gain), -80.0, 1e-9);
}

TEST(Derive, ValidationListsEveryProblem) {
  Scenario s = table2();
  s.kappa = 1.5;
  s.N_s = 0;
  s.T = -1.0;
  try {
    derive(s);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_GE(e.problems().size(), 3u);
  }
}

TEST(Units, DbRoundTrip) {
  for (double db : {-130.0, -80.0, -10.0, 0.0, 3.0, 25.0}) {
    EXPECT_NEAR(linear_to_db(db_to_linear(db)), db, 1e-12 * std::max(1.0, std::abs(db)));
    EXPECT_NEAR(watts_to_dbm(dbm_to_watts(db)), db, 1e-12 * std::max(1.0, std::abs(db)));
  }
  for (double lin : {1e-13, 0.5, 7.0}) EXPECT_NEAR(db_to_linear(linear_to_db(lin)) / lin, 1.0, 1e-12);
}

TEST(LoadScenario, Table2ConfigEqualsPreset) {
  EXPECT_EQ(load_scenario(kTable2Config), table2());
}

TEST(LoadScenario, ShippedConfigEqualsPreset) {
  std::ifstream in(std::string(COGSENSE_CONFIG_DIR) + "/table2.cfg");
  ASSERT_TRUE(in);
  std::ostringstream text;
  text << in.rdbuf();
  EXPECT_EQ(load_scenario(text.str()), table2());
}

TEST(LoadScenario, MissingKeyIsNamed) {
  const std::string text = replace_line(kTable2Config, "f_s_mhz", "");
  try {
    load_scenario(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.key(), "f_s");
    EXPECT_NE(std::string(e.what()).find("f_s"), std::string::npos);
  }
}

TEST(LoadScenario, KappaOutOfRange) {
  EXPECT_THROW(load_scenario(replace_line(kTable2Config, "kappa", "kappa = 1.5")), ValidationError);
}

TEST(LoadScenario, UnknownKeyReportsLine) {
  const std::string text = std::string(kTable2Config) + "bogus = 3\n";
  try {
    load_scenario(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.key(), "bogus");
    EXPECT_EQ(e.line(), 15);
  }
}

TEST(LoadScenario, DuplicateAndMalformedEntries) {
  EXPECT_THROW(load_scenario(std::string(kTable2Config) + "T = 0.1\n"), ParseError);
  EXPECT_THROW(load_scenario(replace_line(kTable2Config, "N_s", "N_s = 2.5")), ParseError);
  EXPECT_THROW(load_scenario(replace_line(kTable2Config, "p_H1", "p_H1 = abc")), ParseError);
  EXPECT_THROW(load_scenario(replace_line(kTable2Config, "p_H1", "p_H1 0.2")), ParseError);
}

TEST(LoadScenario, SnrCrossChecks) {
  EXPECT_EQ(load_scenario(std::string(kTable2Config) + "gamma_s_db = 10\ngamma_p1_db = -10\n"), table2());
  EXPECT_THROW(load_scenario(std::string(kTable2Config) + "gamma_s_db = 12\n"), ValidationError);
}

TEST(LoadScenario, LinearKeysAndRoundTrip) {
  Scenario s = table2();
  s.kappa = 0.1;
  s.h_p1_gain = 0.0;
  EXPECT_EQ(load_scenario(to_config_text(s)), s);
}

TEST(ScenarioHash, StableAndSensitive) {
  EXPECT_EQ(scenario_hash(table2()), scenario_hash(table2()));
  EXPECT_EQ(scenario_hash(table2()).size(), 16u);
  Scenario s = table2();
  s.kappa = 0.1;
  EXPECT_NE(scenario_hash(s), scenario_hash(table2()));
}
