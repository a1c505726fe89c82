#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ttl/controller.hpp"
#include "ttl/csv.hpp"
#include "ttl/errors.hpp"
#include "ttl/guidance.hpp"
#include "ttl/integrator.hpp"
#include "ttl/rnn.hpp"
#include "ttl/vehicle.hpp"

namespace ttl {

struct InitialConditions {
  double u0 = 0.0;
  double w0 = 0.0;
  double theta0 = 0.0;
  double q0 = 0.0;
};

/// Trained estimators for the two channels; absent means the true h1, h2 are
/// used (oracle mode).
struct EstimatorPair {
  RnnNetwork u;
  RnnNetwork w;
};

struct ScenarioConfig {
  TransitionMode mode = TransitionMode::HoverToCruise;
  InitialConditions initial;
  double t_end = 30.0;
  double dt = 1e-3;
  VehicleParams vehicle;
  OuterGains outer;
  InnerGains inner;
  ThrustLimits thrust_limits;
  ShapingConstants shaping;
  std::optional<EstimatorPair> estimators;
  std::uint64_t seed = 1;

  /// Hover start: u(0) = 0.01 m/s, w(0) = 0.001 m/s, theta(0) = 1.6 rad.
  static ScenarioConfig hover_to_cruise() {
    ScenarioConfig c;
    c.mode = TransitionMode::HoverToCruise;
    c.initial = {0.01, 0.001, 1.6, 0.0};
    return c;
  }

  /// Cruise start: u(0) = 1.1 m/s, w(0) = 0.16 m/s, theta(0) = 0.15 rad.
  static ScenarioConfig cruise_to_hover() {
    ScenarioConfig c;
    c.mode = TransitionMode::CruiseToHover;
    c.initial = {1.1, 0.16, 0.15, 0.0};
    return c;
  }

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("scenario: dt must be > 0");
    if (!(t_end >= dt)) throw ConfigError("scenario: t_end must be >= dt");
    if (!std::isfinite(initial.u0) || !std::isfinite(initial.w0) ||
        !std::isfinite(initial.theta0) || !std::isfinite(initial.q0))
      throw ConfigError("scenario: initial values must be finite");
    vehicle.validate();
    outer.validate();
    inner.validate();
    shaping.validate();
    if (estimators) {
      estimators->u.validate();
      estimators->w.validate();
      if (estimators->u.channel != Channel::U || estimators->w.channel != Channel::W)
        throw ConfigError("scenario: estimator channels must be (u, w)");
    }
  }
};

struct TrajectoryRow {
  double t, u, w, theta, q;
  double thrust, tau, eps;
  double u_d, w_d, theta_d;
  double e_u, e_w, e_theta;
  double h1_hat, h2_hat;
  bool eps_saturated, thrust_saturated;
};

struct TrajectoryLog {
  std::vector<TrajectoryRow> rows;
};

inline constexpr const char* kTrajectoryHeader =
    "t,u,w,theta,q,T,tau,eps,u_d,w_d,theta_d,e_u,e_w,e_theta,h1_hat,h2_hat,eps_sat,T_sat";

inline std::string trajectory_to_csv(const TrajectoryLog& log) {
  std::ostringstream out;
  out << kTrajectoryHeader << '\n';
  for (const auto& r : log.rows) {
    for (double v : {r.t, r.u, r.w, r.theta, r.q, r.thrust, r.tau, r.eps, r.u_d, r.w_d, r.theta_d,
                     r.e_u, r.e_w, r.e_theta, r.h1_hat, r.h2_hat})
      out << csv::shortest(v) << ',';
    out << (r.eps_saturated ? 1 : 0) << ',' << (r.thrust_saturated ? 1 : 0) << '\n';
  }
  return out.str();
}

namespace detail {

/// Everything the closed loop computes at one evaluation point.
struct LoopEval {
  Eigen::VectorXd derivative;
  OuterCommand outer;
  DesiredState desired;
  double tau = 0.0;
  double h1_hat = 0.0;
  double h2_hat = 0.0;
};

/// Closed loop with the plant, both estimators and both control loops.
/// State z = [u, w, theta, q, x_u..., x_w...]; network states are present
/// only with trained estimators. The networks are driven by the commands
/// applied over the previous step (`held_thrust`, `held_eps`).
class ClosedLoop {
 public:
  explicit ClosedLoop(const ScenarioConfig& cfg) : cfg_(cfg) {}

  Eigen::Index state_size() const {
    return 4 + (cfg_.estimators ? cfg_.estimators->u.size() + cfg_.estimators->w.size() : 0);
  }

  Eigen::VectorXd initial_state() const {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(state_size());
    const auto& ic = cfg_.initial;
    z.head<4>() << ic.u0, ic.w0, ic.theta0, ic.q0;
    if (cfg_.estimators) {
      const auto& nu = cfg_.estimators->u;
      const auto& nw = cfg_.estimators->w;
      z(4 + nu.readout) = ic.u0 / nu.scaling.output_scale;
      z(4 + nu.size() + nw.readout) = ic.w0 / nw.scaling.output_scale;
    }
    return z;
  }

  /// Thrust and eps the networks see before the first command exists.
  double initial_held_thrust() const {
    const double eps = cfg_.estimators ? cfg_.estimators->u.trained_eps : 0.0;
    return cfg_.vehicle.mass * cfg_.vehicle.gravity * std::sqrt(1.0 - eps * eps);
  }

  LoopEval evaluate(double t, const Eigen::VectorXd& z, double held_thrust,
                    double held_eps) const {
    const VehicleParams& vp = cfg_.vehicle;
    const LongState s{z(0), z(1)};
    const AttState a{z(2), z(3)};
    LoopEval ev;
    ev.derivative.resize(z.size());

    if (cfg_.estimators) {
      const auto& nu = cfg_.estimators->u;
      const auto& nw = cfg_.estimators->w;
      const Eigen::VectorXd xu = z.segment(4, nu.size());
      const Eigen::VectorXd xw = z.segment(4 + nu.size(), nw.size());
      const Eigen::VectorXd ru = rnn_rate_at(nu, xu, scalar_input(nu.normalize_input(held_thrust)));
      const Eigen::VectorXd rw = rnn_rate_at(nw, xw, scalar_input(nw.normalize_input(held_eps)));
      ev.h1_hat = nu.scaling.output_scale * ru(nu.readout) +
                  vp.gravity * std::sqrt(1.0 - nu.trained_eps * nu.trained_eps) -
                  held_thrust / vp.mass;
      ev.h2_hat = nw.scaling.output_scale * rw(nw.readout) - vp.gravity * held_eps;
      ev.derivative.segment(4, nu.size()) = ru;
      ev.derivative.segment(4 + nu.size(), nw.size()) = rw;
    } else {
      ev.h1_hat = h1(s, a.q, vp);
      ev.h2_hat = h2(s, a.q, vp);
    }

    const VelocityReference ref = velocity_reference(t, cfg_.mode, cfg_.shaping);
    ev.desired.u_d = ref.u_d;
    ev.desired.w_d = ref.w_d;
    ev.desired.alpha_d = ref.alpha_d;
    const DesiredRates rates{ref.u_d_dot, ref.w_d_dot};
    ev.outer = velocity_outer_loop(s, a.theta, ev.desired, rates, ev.h1_hat, ev.h2_hat, cfg_.outer,
                                   vp, cfg_.thrust_limits);

    // Pitch reference from the virtual control. q_d differentiates
    // arccos(eps) using the model-predicted dw/dt; d(h2_hat)/dt and the
    // second derivative of w_d are neglected.
    const PitchCommand pc = theta_from_epsilon(ev.outer.eps_raw);
    ev.desired.theta_d = pc.theta;
    ev.desired.q_d = 0.0;
    const double sin_d = std::sin(pc.theta);
    if (!pc.saturated && sin_d > 1e-6) {
      const double w_dot_est = ev.h2_hat + vp.gravity * std::cos(a.theta);
      const double eps_dot = -cfg_.outer.k2 * (w_dot_est - ref.w_d_dot) / vp.gravity;
      ev.desired.q_d = -eps_dot / sin_d;
    }
    ev.tau = attitude_inner_loop(a, ev.desired, cfg_.inner);

    const auto [du, dw] = longitudinal_rates(s, a, ev.outer.thrust, vp);
    const auto [dtheta, dq] = attitude_rates(a, ev.tau, vp);
    ev.derivative.head<4>() << du, dw, dtheta, dq;
    return ev;
  }

 private:
  const ScenarioConfig& cfg_;
};

}  // namespace detail

/// Pitch reference and rate the closed loop would command at t = 0 when the
/// vehicle starts at (u0, w0) with theta0 equal to that reference. Useful for
/// starting a run with zero attitude error.
inline AttState initial_pitch_reference(const ScenarioConfig& cfg) {
  ScenarioConfig c = cfg;
  detail::ClosedLoop loop(c);
  for (int i = 0; i < 50; ++i) {
    const auto ev = loop.evaluate(0.0, loop.initial_state(), loop.initial_held_thrust(), 0.0);
    c.initial.theta0 = ev.desired.theta_d;
    c.initial.q0 = ev.desired.q_d;
  }
  return {c.initial.theta0, c.initial.q0};
}

/// Fixed-step closed-loop run. Controls are evaluated at every RK4 stage;
/// one log row per step boundary, ceil(t_end/dt) + 1 rows (the last step is
/// shortened to land on t_end).
inline TrajectoryLog run_transition(const ScenarioConfig& cfg) {
  cfg.validate();
  detail::ClosedLoop loop(cfg);
  const auto steps = static_cast<long long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));

  TrajectoryLog log;
  log.rows.reserve(static_cast<std::size_t>(steps) + 1);
  Eigen::VectorXd z = loop.initial_state();
  double held_thrust = loop.initial_held_thrust();
  double held_eps = 0.0;

  for (long long k = 0; k <= steps; ++k) {
    const double t = k == steps ? cfg.t_end : static_cast<double>(k) * cfg.dt;
    const detail::LoopEval ev = loop.evaluate(t, z, held_thrust, held_eps);
    TrajectoryRow r{};
    r.t = t;
    r.u = z(0);
    r.w = z(1);
    r.theta = z(2);
    r.q = z(3);
    r.thrust = ev.outer.thrust;
    r.tau = ev.tau;
    r.eps = ev.outer.eps;
    r.u_d = ev.desired.u_d;
    r.w_d = ev.desired.w_d;
    r.theta_d = ev.desired.theta_d;
    r.e_u = r.u - r.u_d;
    r.e_w = r.w - r.w_d;
    r.e_theta = r.theta - r.theta_d;
    r.h1_hat = ev.h1_hat;
    r.h2_hat = ev.h2_hat;
    r.eps_saturated = ev.outer.eps_saturated;
    r.thrust_saturated = ev.outer.thrust_saturated;
    log.rows.push_back(r);
    if (k == steps) break;

    const double t_next = k + 1 == steps ? cfg.t_end : static_cast<double>(k + 1) * cfg.dt;
    const double h = t_next - t;
    const double ht = held_thrust, he = held_eps;
    try {
      z = rk4_step(
          [&](double tt, const Eigen::VectorXd& zz) { return loop.evaluate(tt, zz, ht, he).derivative; },
          z, t, h);
    } catch (const DivergenceError&) {
      throw DivergenceError("simulation diverged", t);
    }
    held_thrust = ev.outer.thrust;
    held_eps = ev.outer.eps;
  }
  return log;
}

}  // namespace ttl
