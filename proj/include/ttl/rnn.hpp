#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "ttl/errors.hpp"
#include "ttl/integrator.hpp"
#include "ttl/vehicle.hpp"

namespace ttl {

/// Which longitudinal channel a network models: U is driven by thrust and
/// predicts u, W is driven by the virtual control eps and predicts w.
enum class Channel { U, W };

inline std::string to_string(Channel c) { return c == Channel::U ? "u" : "w"; }

inline Channel channel_from_string(const std::string& s) {
  if (s == "u" || s == "U") return Channel::U;
  if (s == "w" || s == "W") return Channel::W;
  throw ConfigError("unknown channel '" + s + "' (expected u or w)");
}

/// Affine maps between physical signals and network units.
/// Network input = (raw - input_center) / input_scale; predicted velocity =
/// output_scale * x[readout].
struct Scaling {
  double input_center = 0.0;
  double input_scale = 1.0;
  double output_scale = 1.0;
};

/// Continuous-time recurrent network
///
///   dx/dt = -C x + Wx tanh(x) + Wp tanh(p)
///
/// with C = diag(leak). One neuron (`readout`) carries the velocity
/// prediction. Value type; stepping returns or mutates only this instance.
struct RnnNetwork {
  Eigen::VectorXd state;   // x, n
  Eigen::VectorXd leak;    // diag(C), n, all > 0
  Eigen::MatrixXd w_rec;   // Wx, n x n
  Eigen::MatrixXd w_in;    // Wp, n x k
  Eigen::Index readout = 0;
  Channel channel = Channel::U;
  Scaling scaling;
  /// cos(theta) the U-channel plant was held at while its data was recorded.
  double trained_eps = 0.0;

  Eigen::Index size() const { return state.size(); }
  Eigen::Index inputs() const { return w_in.cols(); }

  void validate() const {
    const auto n = state.size();
    if (n <= 0) throw ConfigError("rnn: empty network");
    if (leak.size() != n || w_rec.rows() != n || w_rec.cols() != n ||
        w_in.rows() != n || w_in.cols() <= 0)
      throw ConfigError("rnn: inconsistent dimensions");
    if (readout < 0 || readout >= n) throw ConfigError("rnn: readout index out of range");
    if ((leak.array() <= 0.0).any()) throw ConfigError("rnn: leak entries must be > 0");
    if (!state.allFinite() || !leak.allFinite() || !w_rec.allFinite() || !w_in.allFinite())
      throw ConfigError("rnn: non-finite entries");
    if (!(scaling.input_scale > 0.0) || !(scaling.output_scale > 0.0))
      throw ConfigError("rnn: scaling factors must be > 0");
  }

  /// Physical input (N or dimensionless eps) to network units.
  double normalize_input(double raw) const {
    return (raw - scaling.input_center) / scaling.input_scale;
  }

  double predicted_velocity() const { return scaling.output_scale * state(readout); }

  /// C = I, Wx ~ U[0.01, 0.1], Wp ~ U[-0.1, 0.1], x = 0.
  static RnnNetwork initialized(Eigen::Index n, Eigen::Index k, std::uint64_t seed,
                                Channel channel = Channel::U) {
    if (n <= 0 || k <= 0) throw ConfigError("rnn: n and k must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> rec(0.01, 0.1);
    std::uniform_real_distribution<double> in(-0.1, 0.1);
    RnnNetwork net;
    net.state = Eigen::VectorXd::Zero(n);
    net.leak = Eigen::VectorXd::Ones(n);
    net.w_rec.resize(n, n);
    net.w_in.resize(n, k);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) net.w_rec(i, j) = rec(rng);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < k; ++j) net.w_in(i, j) = in(rng);
    net.channel = channel;
    return net;
  }
};

/// Right-hand side at an arbitrary state `x`; `p` is in network units.
inline Eigen::VectorXd rnn_rate_at(const RnnNetwork& net, const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& p) {
  if (x.size() != net.size() || p.size() != net.inputs())
    throw ConfigError("rnn_rate: dimension mismatch");
  return (-net.leak.array() * x.array()).matrix() + net.w_rec * x.array().tanh().matrix() +
         net.w_in * p.array().tanh().matrix();
}

inline Eigen::VectorXd rnn_rate(const RnnNetwork& net, const Eigen::VectorXd& p) {
  return rnn_rate_at(net, net.state, p);
}

inline Eigen::VectorXd scalar_input(double p) { return Eigen::VectorXd::Constant(1, p); }

/// Advances the network state by one RK4 step with `p` held constant.
inline RnnNetwork rnn_step(const RnnNetwork& net, const Eigen::VectorXd& p, double dt) {
  if (!(dt > 0.0)) throw UsageError("rnn_step: dt must be > 0");
  RnnNetwork next = net;
  next.state = rk4_step(
      [&](double, const Eigen::VectorXd& x) { return rnn_rate_at(net, x, p); },
      net.state, 0.0, dt);
  return next;
}

/// Predicted d(velocity)/dt in physical units when driven by physical input `raw`.
inline double readout_rate(const RnnNetwork& net, double raw_input) {
  const Eigen::VectorXd r = rnn_rate(net, scalar_input(net.normalize_input(raw_input)));
  return net.scaling.output_scale * r(net.readout);
}

/// Inverts du/dt = h1 - g sqrt(1 - eps^2) + T/m with the network's predicted
/// du/dt. `eps` is the gravity projection the prediction refers to.
inline double estimate_h1(const RnnNetwork& net, double thrust, double eps,
                          const VehicleParams& vp) {
  if (!(std::abs(eps) <= 1.0)) throw DomainError("estimate_h1: |eps| > 1");
  return readout_rate(net, thrust) + vp.gravity * std::sqrt(1.0 - eps * eps) -
         thrust / vp.mass;
}

/// Inverts dw/dt = h2 + g eps with the network's predicted dw/dt.
inline double estimate_h2(const RnnNetwork& net, double eps, const VehicleParams& vp) {
  if (!(std::abs(eps) <= 1.0)) throw DomainError("estimate_h2: |eps| > 1");
  return readout_rate(net, eps) - vp.gravity * eps;
}

/// Channel-dispatching estimate: h1_hat for U (input = thrust), h2_hat for W
/// (input = eps).
inline double nonlinear_estimate(const RnnNetwork& net, double input,
                                 const VehicleParams& vp) {
  return net.channel == Channel::U ? estimate_h1(net, input, net.trained_eps, vp)
                                   : estimate_h2(net, input, vp);
}

// ---------------------------------------------------------------------------
// Online adaptation (estimation error, Lyapunov candidate, weight laws)

/// x_tilde = x - x_hat and the weight errors W - W_hat. For the per-neuron
/// form these are a scalar and two single-row matrices.
struct EstimationError {
  Eigen::VectorXd x_tilde;
  Eigen::MatrixXd wx_tilde;
  Eigen::MatrixXd wp_tilde;
};

struct WeightRates {
  Eigen::MatrixXd d_wx;
  Eigen::MatrixXd d_wp;
};

/// dW_hat_x/dt = x_tilde tanh(x_hat)^T, dW_hat_p/dt = x_tilde tanh(p)^T.
inline WeightRates weight_update_rates(const Eigen::VectorXd& x_tilde,
                                       const Eigen::VectorXd& x_hat,
                                       const Eigen::VectorXd& p) {
  return {x_tilde * x_hat.array().tanh().matrix().transpose(),
          x_tilde * p.array().tanh().matrix().transpose()};
}

/// V = 1/2 |x_tilde|^2 + 1/2 |Wx_tilde|_F^2 + 1/2 |Wp_tilde|_F^2.
inline double lyapunov_value(const EstimationError& e) {
  return 0.5 * (e.x_tilde.squaredNorm() + e.wx_tilde.squaredNorm() +
                e.wp_tilde.squaredNorm());
}

/// Clamps every recurrent weight to at least `floor`.
inline void project_positive(RnnNetwork& net, double floor) {
  net.w_rec = net.w_rec.cwiseMax(floor);
}

}  // namespace ttl
