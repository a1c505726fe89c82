#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ttl/csv.hpp"
#include "ttl/errors.hpp"
#include "ttl/vehicle.hpp"

namespace ttl {

enum class TransitionMode { HoverToCruise, CruiseToHover };

inline std::string to_string(TransitionMode m) {
  return m == TransitionMode::HoverToCruise ? "hc" : "ch";
}

inline TransitionMode mode_from_string(const std::string& s) {
  if (s == "hc" || s == "hover_to_cruise") return TransitionMode::HoverToCruise;
  if (s == "ch" || s == "cruise_to_hover") return TransitionMode::CruiseToHover;
  throw ConfigError("unknown transition mode '" + s + "' (expected hc or ch)");
}

inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

/// Shaping constants of the arctan reference profiles. Velocities in m/s,
/// AoA constants in degrees.
struct ShapingConstants {
  double m_u = 1.0;
  double l_u = 0.5;
  double m_alpha = 6.0;
  double l_alpha = 3.0;

  double a_u() const { return std::numbers::pi / (2.0 * (m_u - l_u)); }
  double a_alpha() const { return std::numbers::pi / (2.0 * (m_alpha - l_alpha)); }

  void validate() const {
    if (!(0.0 < l_u && l_u < m_u)) throw ConfigError("shaping: need 0 < L_u < M_u");
    if (!(0.0 < l_alpha && l_alpha < m_alpha))
      throw ConfigError("shaping: need 0 < L_alpha < M_alpha");
  }
};

namespace detail {

// Linear up to `knee`, then arctan toward knee + pi/(2a).
inline double ramp(double s, double knee, double a) {
  return s <= knee ? s : std::atan(a * (s - knee)) / a + knee;
}

inline double ramp_slope(double s, double knee, double a) {
  if (s <= knee) return 1.0;
  const double z = a * (s - knee);
  return 1.0 / (1.0 + z * z);
}

}  // namespace detail

/// Hover-to-cruise forward velocity profile (m/s).
inline double ud_hover_cruise(double t, const ShapingConstants& sc) {
  return detail::ramp(t / 5.0, sc.l_u, sc.a_u());
}

/// Hover-to-cruise AoA profile (degrees).
inline double alpha_hover_cruise(double t, const ShapingConstants& sc) {
  return detail::ramp(t, sc.l_alpha, sc.a_alpha());
}

struct DesiredState {
  double u_d = 0.0;
  double w_d = 0.0;
  double alpha_d = 0.0;  // rad
  double theta_d = 0.0;  // rad
  double q_d = 0.0;      // rad/s
};

struct DesiredRates {
  double u_d_dot = 0.0;
  double w_d_dot = 0.0;
};

struct PitchCommand {
  double theta = 0.0;
  bool saturated = false;
};

/// arccos of eps clamped to [-1, 1].
inline PitchCommand theta_from_epsilon(double eps) {
  const double c = std::clamp(eps, -1.0, 1.0);
  return {std::acos(c), c != eps};
}

struct VelocityReference {
  double u_d, w_d, alpha_d, u_d_dot, w_d_dot;
};

/// u_d, w_d = u_d tan(alpha_d) and their time derivatives. Cruise-to-hover
/// mirrors the hover-to-cruise profiles as M_u - u and M_alpha - alpha.
inline VelocityReference velocity_reference(double t, TransitionMode mode,
                                            const ShapingConstants& sc) {
  double u = ud_hover_cruise(t, sc);
  double du = detail::ramp_slope(t / 5.0, sc.l_u, sc.a_u()) / 5.0;
  double a_deg = alpha_hover_cruise(t, sc);
  double da_deg = detail::ramp_slope(t, sc.l_alpha, sc.a_alpha());
  if (mode == TransitionMode::CruiseToHover) {
    u = sc.m_u - u;
    du = -du;
    a_deg = sc.m_alpha - a_deg;
    da_deg = -da_deg;
  }
  const double alpha = deg2rad(a_deg);
  const double tan_a = std::tan(alpha);
  const double sec = 1.0 / std::cos(alpha);
  return {u, u * tan_a, alpha, du, du * tan_a + u * sec * sec * deg2rad(da_deg)};
}

inline DesiredRates desired_rates(double t, TransitionMode mode, const ShapingConstants& sc) {
  const auto r = velocity_reference(t, mode, sc);
  return {r.u_d_dot, r.w_d_dot};
}

/// Pitch that the w-channel virtual control demands when the vehicle sits
/// exactly on the velocity reference: eps = (w_d_dot - h2(u_d, w_d, 0)) / g.
inline PitchCommand reference_pitch(double t, TransitionMode mode, const ShapingConstants& sc,
                                    const VehicleParams& vp) {
  const auto r = velocity_reference(std::max(t, 0.0), mode, sc);
  const double eps = (r.w_d_dot - h2({r.u_d, r.w_d}, 0.0, vp)) / vp.gravity;
  return theta_from_epsilon(eps);
}

/// Reference at time t. q_d is the centered difference of theta_d with
/// step `fd_step` (one-sided at t < fd_step).
inline DesiredState desired_state(double t, TransitionMode mode, const ShapingConstants& sc,
                                  const VehicleParams& vp, double fd_step = 1e-3) {
  if (!(t >= 0.0)) throw UsageError("desired_state: t must be >= 0");
  const auto r = velocity_reference(t, mode, sc);
  DesiredState d;
  d.u_d = r.u_d;
  d.w_d = r.w_d;
  d.alpha_d = r.alpha_d;
  d.theta_d = reference_pitch(t, mode, sc, vp).theta;
  const double lo = std::max(0.0, t - fd_step);
  const double hi = t + fd_step;
  d.q_d = (reference_pitch(hi, mode, sc, vp).theta - reference_pitch(lo, mode, sc, vp).theta) /
          (hi - lo);
  return d;
}

inline std::string reference_to_csv(TransitionMode mode, const ShapingConstants& sc,
                                    const VehicleParams& vp, double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw ConfigError("export-refs: need dt > 0, t_end >= 0");
  std::ostringstream out;
  out << "t,u_d,w_d,alpha_d_deg,theta_d,q_d\n";
  const auto steps = static_cast<long long>(std::ceil(t_end / dt - 1e-9));
  for (long long k = 0; k <= steps; ++k) {
    const double t = std::min(static_cast<double>(k) * dt, t_end);
    const DesiredState d = desired_state(t, mode, sc, vp, dt);
    out << csv::shortest(t) << ',' << csv::shortest(d.u_d) << ',' << csv::shortest(d.w_d) << ','
        << csv::shortest(d.alpha_d * 180.0 / std::numbers::pi) << ','
        << csv::shortest(d.theta_d) << ',' << csv::shortest(d.q_d) << '\n';
  }
  return out.str();
}

}  // namespace ttl
