#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>

#include "ttl/errors.hpp"
#include "ttl/guidance.hpp"
#include "ttl/vehicle.hpp"

namespace ttl {

struct OuterGains {
  double k1 = 2.0;
  double k2 = 2.0;

  void validate() const {
    if (!(k1 > 0.0) || !(k2 > 0.0)) throw ConfigError("gains: k1 and k2 must be > 0");
  }
};

struct InnerGains {
  double k3 = 16.0;
  double k4 = 8.0;

  void validate() const {
    if (!(k3 > 0.0) || !(k4 > 0.0)) throw ConfigError("gains: k3 and k4 must be > 0");
  }
};

struct ThrustLimits {
  double min = 0.0;
  double max = std::numeric_limits<double>::infinity();
};

struct OuterCommand {
  double thrust = 0.0;
  double thrust_raw = 0.0;
  bool thrust_saturated = false;
  double eps = 0.0;      // clamped to [-1, 1]
  double eps_raw = 0.0;
  bool eps_saturated = false;
};

/// Feedback-linearizing velocity loop:
///
///   v_u = -k1 e_u + u_d_dot          v_w = -k2 e_w + w_d_dot
///   T   = m (v_u - h1_hat) + m g sin(theta)
///   eps = (v_w - h2_hat) / g
///
/// so that du/dt = v_u and dw/dt = v_w once h_hat = h and cos(theta) = eps.
/// `theta` is the measured pitch.
inline OuterCommand velocity_outer_loop(const LongState& s, double theta, const DesiredState& d,
                                        const DesiredRates& d_dot, double h1_hat, double h2_hat,
                                        const OuterGains& gains, const VehicleParams& vp,
                                        const ThrustLimits& limits = {}) {
  const double v_u = -gains.k1 * (s.u - d.u_d) + d_dot.u_d_dot;
  const double v_w = -gains.k2 * (s.w - d.w_d) + d_dot.w_d_dot;
  OuterCommand c;
  c.eps_raw = (v_w - h2_hat) / vp.gravity;
  c.eps = std::clamp(c.eps_raw, -1.0, 1.0);
  c.eps_saturated = c.eps != c.eps_raw;
  c.thrust_raw = vp.mass * (v_u - h1_hat) + vp.mass * vp.gravity * std::sin(theta);
  c.thrust = std::clamp(c.thrust_raw, limits.min, limits.max);
  c.thrust_saturated = c.thrust != c.thrust_raw;
  return c;
}

/// tau = -k3 (theta - theta_d) - k4 (q - q_d).
inline double attitude_inner_loop(const AttState& a, const DesiredState& d,
                                  const InnerGains& gains) {
  return -gains.k3 * (a.theta - d.theta_d) - gains.k4 * (a.q - d.q_d);
}

struct AttitudeErrorSystem {
  Eigen::Matrix2d a;
  std::complex<double> lambda1;
  std::complex<double> lambda2;
  bool hurwitz = false;
};

/// A = [[0, 1], [-k3, -k4]] of the pitch error dynamics and its eigenvalues
/// (sorted by real part, then imaginary part). `hurwitz` uses the 2x2 trace /
/// determinant test (tr A < 0 and det A > 0), which is exact on the boundary
/// where numerically computed eigenvalues sit at +-0.
inline AttitudeErrorSystem attitude_error_matrix(const InnerGains& gains) {
  AttitudeErrorSystem sys;
  sys.a << 0.0, 1.0, -gains.k3, -gains.k4;
  Eigen::EigenSolver<Eigen::Matrix2d> es(sys.a, false);
  if (es.info() != Eigen::Success) throw DomainError("attitude_error_matrix: eigensolver failed");
  std::complex<double> l1 = es.eigenvalues()(0), l2 = es.eigenvalues()(1);
  auto less = [](const std::complex<double>& x, const std::complex<double>& y) {
    return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag());
  };
  if (less(l2, l1)) std::swap(l1, l2);
  sys.lambda1 = l1;
  sys.lambda2 = l2;
  sys.hurwitz = sys.a.trace() < 0.0 && sys.a.determinant() > 0.0;
  return sys;
}

}  // namespace ttl
