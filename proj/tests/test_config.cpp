#include <cstdlib>
#include <filesystem>

#include <gtest/gtest.h>

#include "ttl/config.hpp"

namespace ttl {
namespace {

TEST(Config, ParsesKeyValuesAndComments) {
  const auto c = Config::parse("# header\nmass = 2.5\n\n  k1=3 # trailing\nmode = ch\n");
  EXPECT_TRUE(c.has("mass"));
  EXPECT_EQ(c.number("mass", 0.0), 2.5);
  EXPECT_EQ(c.number("k1", 0.0), 3.0);
  EXPECT_EQ(c.text("mode", "hc"), "ch");
  EXPECT_EQ(c.number("missing", 7.0), 7.0);
  EXPECT_FALSE(c.has("missing"));
}

TEST(Config, Errors) {
  EXPECT_THROW(Config::parse("no equals sign\n"), ConfigError);
  EXPECT_THROW(Config::parse(" = 3\n"), ConfigError);
  EXPECT_THROW(Config::parse("mass = heavy\n").number("mass", 1.0), ConfigError);
  EXPECT_THROW(Config::load("/nonexistent/dir/cfg.txt"), ConfigError);
  EXPECT_THROW(vehicle_from(Config::parse("mass = -1\n")), ConfigError);
  EXPECT_THROW(outer_gains_from(Config::parse("k2 = 0\n")), ConfigError);
  EXPECT_THROW(train_options_from(Config::parse("lr = 0\n")), ConfigError);
  EXPECT_THROW(excitation_from(Config::parse("input_max_w = 2\n"), Channel::W), ConfigError);
}

TEST(Config, SeedEnvironmentOverride) {
  const auto c = Config::parse("seed = 5\n");
  unsetenv("TTL_SEED");
  EXPECT_EQ(c.seed(), 5u);
  setenv("TTL_SEED", "123", 1);
  EXPECT_EQ(c.seed(), 123u);
  setenv("TTL_SEED", "12x", 1);
  EXPECT_THROW(c.seed(), ConfigError);
  unsetenv("TTL_SEED");
}

TEST(Config, Builders) {
  const auto c = Config::parse(
      "mass = 2\ninertia = 3\nk_aero = 0.1\ncd0 = 0.03\nk1 = 1.5\nk3 = -2\nM_u = 2\n"
      "n_samples = 100\ninput_min_u = 2\ninput_max_u = 12\nepochs = 7\nmode = ch\n"
      "t_end = 4\nsim_dt = 0.002\nu0 = 0.9\n");
  const auto vp = vehicle_from(c);
  EXPECT_EQ(vp.mass, 2.0);
  EXPECT_EQ(vp.inertia, 3.0);
  EXPECT_EQ(vp.aero.k, 0.1);
  EXPECT_EQ(vp.aero.cd0, 0.03);
  EXPECT_EQ(outer_gains_from(c).k1, 1.5);
  EXPECT_EQ(inner_gains_from(c).k3, -2.0);  // inspected, not validated
  EXPECT_EQ(shaping_from(c).m_u, 2.0);
  const auto e = excitation_from(c, Channel::U);
  EXPECT_EQ(e.n_samples, 100u);
  EXPECT_EQ(e.input_min, 2.0);
  EXPECT_EQ(e.input_max, 12.0);
  EXPECT_EQ(excitation_from(c, Channel::W).input_min, -1.0);
  EXPECT_EQ(train_options_from(c).epochs, 7u);
  EXPECT_THROW(scenario_from(c), ConfigError);  // k3 < 0 rejected for a run

  const auto s = scenario_from(Config::parse("mode = ch\nt_end = 4\nsim_dt = 0.002\nu0 = 0.9\n"));
  EXPECT_EQ(s.mode, TransitionMode::CruiseToHover);
  EXPECT_EQ(s.initial.u0, 0.9);
  EXPECT_EQ(s.initial.w0, 0.16);
  EXPECT_EQ(s.t_end, 4.0);
  EXPECT_EQ(s.dt, 0.002);
  EXPECT_FALSE(s.estimators.has_value());
}

TEST(Config, ScenarioWeights) {
  const auto dir = std::filesystem::temp_directory_path() / "ttl_config_test";
  std::filesystem::create_directories(dir);
  save_weights((dir / "u.csv").string(), RnnNetwork::initialized(4, 1, 1, Channel::U));
  save_weights((dir / "w.csv").string(), RnnNetwork::initialized(4, 1, 2, Channel::W));
  csv::write_file((dir / "s.cfg").string(), "weights_u = u.csv\nweights_w = w.csv\n");
  const auto s = scenario_from(Config::load((dir / "s.cfg").string()));
  ASSERT_TRUE(s.estimators.has_value());
  EXPECT_EQ(s.estimators->w.channel, Channel::W);
  EXPECT_FALSE(scenario_from(Config::load((dir / "s.cfg").string()), true).estimators);
  EXPECT_THROW(scenario_from(Config::parse("weights_u = u.csv\n")), ConfigError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace ttl
