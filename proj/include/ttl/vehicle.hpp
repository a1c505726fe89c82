#pragma once

#include <cmath>
#include <utility>

#include "ttl/errors.hpp"

namespace ttl {

/// Flat-plate aerodynamics: C_L = 2 sin(a) cos(a), C_D = 2 sin^2(a) + cd0,
/// both scaled by k (force s^2/m^2) and V^2.
struct AeroParams {
  double k = 0.05;
  double cd0 = 0.02;

  void validate() const {
    if (!(k > 0.0)) throw ConfigError("aero: k_aero must be > 0");
    if (!(cd0 >= 0.0)) throw ConfigError("aero: cd0 must be >= 0");
  }
};

struct VehicleParams {
  double mass = 1.0;     // kg
  double inertia = 1.0;  // kg m^2, pitch axis
  double gravity = 9.81;
  AeroParams aero;

  void validate() const {
    if (!(mass > 0.0)) throw ConfigError("vehicle: mass must be > 0");
    if (!(inertia > 0.0)) throw ConfigError("vehicle: inertia must be > 0");
    if (!(gravity > 0.0)) throw ConfigError("vehicle: gravity must be > 0");
    aero.validate();
  }
};

/// Body-frame longitudinal velocities (m/s).
struct LongState {
  double u = 0.0;
  double w = 0.0;
};

struct AttState {
  double theta = 0.0;  // rad
  double q = 0.0;      // rad/s
};

struct ControlInput {
  double thrust = 0.0;  // N
  double tau = 0.0;     // N m
};

struct AeroForces {
  double lift = 0.0;
  double drag = 0.0;
};

/// atan2(w, u); zero at zero airspeed.
inline double angle_of_attack(const LongState& s) {
  if (s.u == 0.0 && s.w == 0.0) return 0.0;
  return std::atan2(s.w, s.u);
}

inline double lift_coefficient(double alpha) {
  return 2.0 * std::sin(alpha) * std::cos(alpha);
}

inline double drag_coefficient(double alpha, double cd0) {
  const double s = std::sin(alpha);
  return 2.0 * s * s + cd0;
}

inline AeroForces aero_forces(const LongState& s, const AeroParams& p) {
  const double v2 = s.u * s.u + s.w * s.w;
  const double alpha = angle_of_attack(s);
  return {p.k * lift_coefficient(alpha) * v2,
          p.k * drag_coefficient(alpha, p.cd0) * v2};
}

/// Nonlinear part of the u dynamics: (-D cos a + L sin a)/m - q w.
inline double h1(const LongState& s, double q, const VehicleParams& vp) {
  const double alpha = angle_of_attack(s);
  const AeroForces f = aero_forces(s, vp.aero);
  return (-f.drag * std::cos(alpha) + f.lift * std::sin(alpha)) / vp.mass -
         q * s.w;
}

/// Nonlinear part of the w dynamics: (-D sin a - L cos a)/m + q u.
inline double h2(const LongState& s, double q, const VehicleParams& vp) {
  const double alpha = angle_of_attack(s);
  const AeroForces f = aero_forces(s, vp.aero);
  return (-f.drag * std::sin(alpha) - f.lift * std::cos(alpha)) / vp.mass +
         q * s.u;
}

/// Returns (du/dt, dw/dt) of the longitudinal subsystem.
inline std::pair<double, double> longitudinal_rates(const LongState& s,
                                                    const AttState& att,
                                                    double thrust,
                                                    const VehicleParams& vp) {
  const double alpha = angle_of_attack(s);
  const AeroForces f = aero_forces(s, vp.aero);
  const double ca = std::cos(alpha);
  const double sa = std::sin(alpha);
  const double du = (thrust - f.drag * ca + f.lift * sa) / vp.mass -
                    vp.gravity * std::sin(att.theta) - att.q * s.w;
  const double dw = (-f.drag * sa - f.lift * ca) / vp.mass +
                    vp.gravity * std::cos(att.theta) + att.q * s.u;
  return {du, dw};
}

/// Returns (dtheta/dt, dq/dt).
inline std::pair<double, double> attitude_rates(const AttState& a, double tau,
                                                const VehicleParams& vp) {
  return {a.q, tau / vp.inertia};
}

}  // namespace ttl
