#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "ttl/integrator.hpp"

namespace ttl {
namespace {

TEST(Rk4Step, ZeroFieldLeavesStateUnchanged) {
  const Eigen::Vector3d x(1.0, -2.0, 3.5);
  const Eigen::Vector3d y =
      rk4_step([](double, const Eigen::Vector3d&) { return Eigen::Vector3d::Zero().eval(); }, x,
               0.0, 0.1);
  EXPECT_EQ(x, y);
}

TEST(Rk4Step, ExponentialDecay) {
  const double y = rk4_step([](double, double x) { return -x; }, 1.0, 0.0, 0.001);
  EXPECT_NEAR(y, std::exp(-0.001), 1e-12);
}

TEST(Rk4Step, ExactForConstantAndPolynomialFields) {
  EXPECT_EQ(rk4_step([](double, double) { return 1.0; }, 0.0, 0.0, 0.1), 0.1);
  // dx/dt = 3 t^2 integrates exactly (Simpson's rule).
  const double y = rk4_step([](double t, double) { return 3.0 * t * t; }, 0.0, 0.5, 0.25);
  EXPECT_NEAR(y, std::pow(0.75, 3) - std::pow(0.5, 3), 1e-15);
}

TEST(Rk4Step, Deterministic) {
  auto f = [](double t, const Eigen::Vector2d& x) {
    return Eigen::Vector2d(std::sin(x(1)) + t, -x(0) * x(0)).eval();
  };
  const Eigen::Vector2d x0(0.3, 0.7);
  EXPECT_EQ(rk4_step(f, x0, 0.2, 0.01), rk4_step(f, x0, 0.2, 0.01));
}

TEST(Rk4Step, NonFiniteStageThrows) {
  auto f = [](double, double x) { return x > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0; };
  EXPECT_THROW(rk4_step(f, 0.0, 0.0, 1.0), DivergenceError);
  try {
    rk4_step(f, 0.0, 2.5, 1.0);
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.where(), 2.5);
  }
}

}  // namespace
}  // namespace ttl
