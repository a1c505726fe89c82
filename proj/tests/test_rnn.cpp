#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ttl/rnn.hpp"
#include "ttl/rnn_io.hpp"

namespace ttl {
namespace {

RnnNetwork scalar_net(double c, double wx, double wp, double x) {
  RnnNetwork net;
  net.state = Eigen::VectorXd::Constant(1, x);
  net.leak = Eigen::VectorXd::Constant(1, c);
  net.w_rec = Eigen::MatrixXd::Constant(1, 1, wx);
  net.w_in = Eigen::MatrixXd::Constant(1, 1, wp);
  return net;
}

TEST(RnnRate, Examples) {
  EXPECT_EQ(rnn_rate(scalar_net(1, 0, 0, 2), scalar_input(123.0))(0), -2.0);
  EXPECT_NEAR(rnn_rate(scalar_net(1, 0, 1, 0), scalar_input(0.5))(0), 0.46211715726000974,
              1e-15);
  const auto net = RnnNetwork::initialized(8, 1, 3);
  EXPECT_TRUE(rnn_rate(net, scalar_input(0.0)).isZero(0.0));
}

TEST(RnnRate, DimensionMismatch) {
  const auto net = RnnNetwork::initialized(4, 1, 3);
  EXPECT_THROW(rnn_rate(net, Eigen::VectorXd::Zero(2)), ConfigError);
}

TEST(RnnStep, Examples) {
  const auto still = RnnNetwork::initialized(8, 1, 9);
  EXPECT_EQ(rnn_step(still, scalar_input(0.0), 0.01).state, still.state);

  const auto decay = rnn_step(scalar_net(1, 0, 0, 1), scalar_input(0.0), 0.001);
  EXPECT_NEAR(decay.state(0), std::exp(-0.001), 1e-12);

  auto net = RnnNetwork::initialized(8, 1, 4);
  net.state.setLinSpaced(-1.0, 1.0);
  const auto a = rnn_step(net, scalar_input(0.3), 0.01);
  const auto b = rnn_step(net, scalar_input(0.3), 0.01);
  EXPECT_EQ(a.state, b.state);
  EXPECT_EQ(net.state(0), -1.0);  // input untouched
}

TEST(RnnStep, Errors) {
  auto net = scalar_net(1, 0, 0, 1);
  EXPECT_THROW(rnn_step(net, scalar_input(0.0), 0.0), UsageError);
  net.state(0) = std::nan("");
  EXPECT_THROW(rnn_step(net, scalar_input(0.0), 0.01), DivergenceError);
}

TEST(RnnNetwork, InitializedRanges) {
  const auto net = RnnNetwork::initialized(8, 1, 42);
  EXPECT_NO_THROW(net.validate());
  EXPECT_TRUE(net.leak.isOnes());
  EXPECT_GE(net.w_rec.minCoeff(), 0.01);
  EXPECT_LE(net.w_rec.maxCoeff(), 0.1);
  EXPECT_GE(net.w_in.minCoeff(), -0.1);
  EXPECT_LE(net.w_in.maxCoeff(), 0.1);
  EXPECT_EQ(net.w_rec, RnnNetwork::initialized(8, 1, 42).w_rec);
  EXPECT_NE(net.w_rec, RnnNetwork::initialized(8, 1, 43).w_rec);
}

TEST(RnnNetwork, ValidateRejectsBadNetworks) {
  auto net = RnnNetwork::initialized(3, 1, 1);
  net.leak(1) = 0.0;
  EXPECT_THROW(net.validate(), ConfigError);
  net = RnnNetwork::initialized(3, 1, 1);
  net.readout = 3;
  EXPECT_THROW(net.validate(), ConfigError);
  net = RnnNetwork::initialized(3, 1, 1);
  net.w_rec(0, 0) = std::nan("");
  EXPECT_THROW(net.validate(), ConfigError);
  EXPECT_THROW(RnnNetwork::initialized(0, 1, 1), ConfigError);
}

TEST(NonlinearEstimate, Examples) {
  const VehicleParams vp;
  // Zero weights and state: readout rate is 0.
  auto w = scalar_net(1, 0, 0, 0);
  w.channel = Channel::W;
  EXPECT_EQ(estimate_h2(w, 0.0, vp), 0.0);
  EXPECT_EQ(nonlinear_estimate(w, 0.0, vp), 0.0);
  EXPECT_THROW(estimate_h2(w, 1.5, vp), DomainError);
  EXPECT_THROW(estimate_h1(w, 9.81, -1.01, vp), DomainError);
}

// When the readout rate equals the plant's du/dt the inversion returns h1.
TEST(NonlinearEstimate, InvertsThePlantExactly) {
  VehicleParams vp;
  vp.mass = 1.7;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> vel(-5, 5), thrust(0, 20), ep(-1, 1), q(-2, 2);
  for (int i = 0; i < 500; ++i) {
    const LongState s{vel(rng), vel(rng)};
    const double qq = q(rng), t = thrust(rng), eps = ep(rng);
    const double theta = std::acos(eps);
    const auto [du, dw] = longitudinal_rates(s, {theta, qq}, t, vp);
    // Network whose readout rate is exactly du: x = 0, Wp tanh(p) = du / s_out.
    RnnNetwork net = scalar_net(1, 0, 0, 0);
    net.scaling = {0.0, 1.0, 10.0};
    net.w_in(0, 0) = du / 10.0 / std::tanh(t);
    if (t < 1e-3) continue;
    EXPECT_NEAR(estimate_h1(net, t, eps, vp), h1(s, qq, vp), 1e-9);
    net.w_in(0, 0) = dw / 10.0 / std::tanh(eps);
    if (std::abs(eps) < 1e-3) continue;
    EXPECT_NEAR(estimate_h2(net, eps, vp), h2(s, qq, vp), 1e-9);
  }
}

TEST(WeightUpdateRates, Examples) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  auto r = weight_update_rates(zero, Eigen::VectorXd::Constant(1, 0.7), scalar_input(0.4));
  EXPECT_TRUE(r.d_wx.isZero(0.0));
  EXPECT_TRUE(r.d_wp.isZero(0.0));

  r = weight_update_rates(Eigen::VectorXd::Constant(1, 0.5),
                          Eigen::VectorXd::Constant(1, std::atanh(0.2)), scalar_input(0.0));
  EXPECT_NEAR(r.d_wx(0, 0), 0.1, 1e-15);

  r = weight_update_rates(Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 0.3),
                          scalar_input(0.0));
  EXPECT_EQ(r.d_wp(0, 0), 0.0);
}

// sign(dW) = sign(x_tilde) * sign(tanh(.)) element-wise.
TEST(WeightUpdateRates, SignRelationProperty) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3, 3);
  auto sgn = [](double v) { return (v > 0) - (v < 0); };
  for (int trial = 0; trial < 300; ++trial) {
    Eigen::VectorXd xt(4), xh(4), p(2);
    for (auto* v : {&xt, &xh, &p})
      for (Eigen::Index i = 0; i < v->size(); ++i) (*v)(i) = u(rng);
    const auto r = weight_update_rates(xt, xh, p);
    for (Eigen::Index i = 0; i < 4; ++i) {
      for (Eigen::Index j = 0; j < 4; ++j)
        EXPECT_EQ(sgn(r.d_wx(i, j)), sgn(xt(i)) * sgn(xh(j)));
      for (Eigen::Index j = 0; j < 2; ++j) EXPECT_EQ(sgn(r.d_wp(i, j)), sgn(xt(i)) * sgn(p(j)));
    }
  }
}

TEST(Lyapunov, Examples) {
  EstimationError e{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 2),
                    Eigen::MatrixXd::Zero(1, 1)};
  EXPECT_EQ(lyapunov_value(e), 0.0);
  e.x_tilde(0) = 1.0;
  EXPECT_EQ(lyapunov_value(e), 0.5);
  e.wx_tilde << 1.0, 1.0;
  e.wp_tilde << 2.0;
  EXPECT_EQ(lyapunov_value(e), 3.5);
}

TEST(Lyapunov, NonNegativeProperty) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 2);
  for (int i = 0; i < 200; ++i) {
    EstimationError e{Eigen::VectorXd::NullaryExpr(5, [&] { return n(rng); }),
                      Eigen::MatrixXd::NullaryExpr(5, 5, [&] { return n(rng); }),
                      Eigen::MatrixXd::NullaryExpr(5, 1, [&] { return n(rng); })};
    EXPECT_GE(lyapunov_value(e), 0.0);
  }
}

TEST(ProjectPositive, ClampsRecurrentWeights) {
  auto net = RnnNetwork::initialized(4, 1, 5);
  net.w_rec(1, 2) = -3.0;
  net.w_rec(0, 0) = 0.0;
  net.w_in(0, 0) = -3.0;
  project_positive(net, 1e-4);
  EXPECT_GE(net.w_rec.minCoeff(), 1e-4);
  EXPECT_EQ(net.w_in(0, 0), -3.0);
}

TEST(WeightSnapshot, RoundTripProperty) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n(0, 1e3);
  for (int trial = 0; trial < 20; ++trial) {
    auto net = RnnNetwork::initialized(1 + trial % 9, 1 + trial % 2, trial,
                                       trial % 2 ? Channel::W : Channel::U);
    net.w_rec = net.w_rec.unaryExpr([&](double) { return n(rng) * 1e-7; });
    net.leak = net.leak.unaryExpr([&](double) { return std::abs(n(rng)) + 1e-9; });
    net.state = net.state.unaryExpr([&](double) { return n(rng); });
    net.readout = trial % net.size();
    net.scaling = {n(rng), 1.0 / 3.0, 7.25};
    net.trained_eps = 0.1 * (trial % 3);
    const auto back = weights_from_csv(weights_to_csv(net));
    EXPECT_EQ(back.leak, net.leak);
    EXPECT_EQ(back.w_rec, net.w_rec);
    EXPECT_EQ(back.w_in, net.w_in);
    EXPECT_EQ(back.readout, net.readout);
    EXPECT_EQ(back.channel, net.channel);
    EXPECT_EQ(back.scaling.input_center, net.scaling.input_center);
    EXPECT_EQ(back.scaling.input_scale, net.scaling.input_scale);
    EXPECT_EQ(back.scaling.output_scale, net.scaling.output_scale);
    EXPECT_EQ(back.trained_eps, net.trained_eps);
    EXPECT_EQ(weights_to_csv(back), weights_to_csv(net));
  }
}

TEST(WeightSnapshot, RejectsMalformedText) {
  const auto good = weights_to_csv(RnnNetwork::initialized(2, 1, 1));
  EXPECT_THROW(weights_from_csv(""), ConfigError);
  EXPECT_THROW(weights_from_csv("a,b,c,d\n"), ConfigError);
  // Drop the last entry: a weight stays unset.
  const auto truncated = good.substr(0, good.rfind('\n', good.size() - 2) + 1);
  EXPECT_THROW(weights_from_csv(truncated), ConfigError);
}

TEST(Channel, StringConversion) {
  EXPECT_EQ(channel_from_string("u"), Channel::U);
  EXPECT_EQ(channel_from_string("w"), Channel::W);
  EXPECT_EQ(to_string(Channel::W), "w");
  EXPECT_THROW(channel_from_string("x"), ConfigError);
}

}  // namespace
}  // namespace ttl
