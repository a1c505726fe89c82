#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "ttl/vehicle.hpp"

namespace ttl {
namespace {

VehicleParams unit_vehicle() { return VehicleParams{}; }  // m = J = 1, g = 9.81, K = 0.05, cd0 = 0.02

TEST(AngleOfAttack, Examples) {
  EXPECT_EQ(angle_of_attack({1.0, 0.0}), 0.0);
  EXPECT_NEAR(angle_of_attack({1.0, 1.0}), std::numbers::pi / 4, 1e-15);
  // atan(0.1)
  EXPECT_NEAR(angle_of_attack({0.01, 0.001}), 0.0996686524911620, 1e-12);
  EXPECT_EQ(angle_of_attack({0.0, 0.0}), 0.0);
}

TEST(AeroForces, Examples) {
  const AeroParams p{0.05, 0.02};
  const auto rest = aero_forces({0.0, 0.0}, p);
  EXPECT_EQ(rest.lift, 0.0);
  EXPECT_EQ(rest.drag, 0.0);

  const auto level = aero_forces({10.0, 0.0}, p);
  EXPECT_EQ(level.lift, 0.0);
  EXPECT_NEAR(level.drag, 0.1, 1e-15);

  const auto diag = aero_forces({1.0, 1.0}, p);
  EXPECT_NEAR(diag.lift, 0.1, 1e-15);
  EXPECT_NEAR(diag.drag, 0.102, 1e-15);
}

TEST(NonlinearTerms, H1Examples) {
  const auto vp = unit_vehicle();
  EXPECT_EQ(h1({0.0, 0.0}, 0.0, vp), 0.0);
  EXPECT_EQ(h1({0.0, 0.0}, 5.0, vp), 0.0);
  // (-0.102 cos(pi/4) + 0.1 sin(pi/4)) - 0.5
  EXPECT_NEAR(h1({1.0, 1.0}, 0.5, vp), -0.50141421356237, 1e-12);
}

TEST(NonlinearTerms, H2Examples) {
  const auto vp = unit_vehicle();
  EXPECT_EQ(h2({0.0, 0.0}, 0.0, vp), 0.0);
  EXPECT_NEAR(h2({1.0, 0.0}, 2.0, vp), 2.0, 1e-15);
  // -0.202 / sqrt(2)
  EXPECT_NEAR(h2({1.0, 1.0}, 0.0, vp), -0.14283556979968, 1e-12);
}

TEST(LongitudinalRates, Examples) {
  const auto vp = unit_vehicle();
  const double half_pi = std::numbers::pi / 2;
  auto [du, dw] = longitudinal_rates({0.0, 0.0}, {half_pi, 0.0}, 9.81, vp);
  EXPECT_NEAR(du, 0.0, 1e-15);
  EXPECT_NEAR(dw, 0.0, 1e-15);

  std::tie(du, dw) = longitudinal_rates({0.0, 0.0}, {half_pi, 0.0}, 0.0, vp);
  EXPECT_NEAR(du, -9.81, 1e-15);
  EXPECT_NEAR(dw, 0.0, 1e-15);

  std::tie(du, dw) = longitudinal_rates({0.0, 0.0}, {0.0, 0.0}, 0.0, vp);
  EXPECT_NEAR(du, 0.0, 1e-15);
  EXPECT_NEAR(dw, 9.81, 1e-15);
}

TEST(AttitudeRates, Examples) {
  const auto vp = unit_vehicle();
  auto [dth, dq] = attitude_rates({0.0, 0.0}, 0.0, vp);
  EXPECT_EQ(dth, 0.0);
  EXPECT_EQ(dq, 0.0);
  std::tie(dth, dq) = attitude_rates({0.0, 0.1}, 0.0, vp);
  EXPECT_EQ(dth, 0.1);
  EXPECT_EQ(dq, 0.0);
  std::tie(dth, dq) = attitude_rates({1.0, 0.0}, 0.5, vp);
  EXPECT_EQ(dth, 0.0);
  EXPECT_EQ(dq, 0.5);
}

// du/dt = h1 - g sin(theta) + T/m and dw/dt = h2 + g cos(theta).
TEST(LongitudinalRates, DecompositionIdentityProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> vel(-30.0, 30.0), ang(-4.0, 4.0), rate(-3.0, 3.0),
      thrust(0.0, 20.0), mass(0.2, 5.0);
  for (int i = 0; i < 2000; ++i) {
    VehicleParams vp;
    vp.mass = mass(rng);
    const LongState s{vel(rng), vel(rng)};
    const AttState a{ang(rng), rate(rng)};
    const double t = thrust(rng);
    const auto [du, dw] = longitudinal_rates(s, a, t, vp);
    const double du_ref = h1(s, a.q, vp) - vp.gravity * std::sin(a.theta) + t / vp.mass;
    const double dw_ref = h2(s, a.q, vp) + vp.gravity * std::cos(a.theta);
    EXPECT_NEAR(du, du_ref, 1e-12 * (1.0 + std::abs(du_ref)));
    EXPECT_NEAR(dw, dw_ref, 1e-12 * (1.0 + std::abs(dw_ref)));
  }
}

TEST(NonlinearTerms, ContinuousAtOrigin) {
  const auto vp = unit_vehicle();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dir(-std::numbers::pi, std::numbers::pi);
  double prev = 1.0;
  for (double r : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    double worst = 0.0;
    for (int i = 0; i < 64; ++i) {
      const double phi = dir(rng);
      const LongState s{r * std::cos(phi), r * std::sin(phi)};
      worst = std::max({worst, std::abs(h1(s, 0.3, vp)), std::abs(h2(s, 0.3, vp))});
    }
    // |h| <= K (2 + cd0) r^2 / m + |q| r
    EXPECT_LE(worst, 0.05 * 2.02 * r * r + 0.3 * r + 1e-15);
    EXPECT_LE(worst, prev);
    prev = worst;
  }
}

TEST(AeroForces, ZeroAoaSigns) {
  const AeroParams p;
  for (double u : {0.1, 1.0, 5.0, 40.0}) {
    const auto f = aero_forces({u, 0.0}, p);
    EXPECT_EQ(f.lift, 0.0);
    EXPECT_GE(f.drag, 0.0);
  }
}

TEST(VehicleParams, Validation) {
  VehicleParams vp;
  EXPECT_NO_THROW(vp.validate());
  vp.mass = 0.0;
  EXPECT_THROW(vp.validate(), ConfigError);
  vp = {};
  vp.aero.cd0 = -0.1;
  EXPECT_THROW(vp.validate(), ConfigError);
}

}  // namespace
}  // namespace ttl
