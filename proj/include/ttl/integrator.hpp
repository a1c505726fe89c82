#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "ttl/errors.hpp"

namespace ttl {

namespace detail {

inline bool all_finite(double v) { return std::isfinite(v); }

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

}  // namespace detail

/// One classical fourth-order Runge-Kutta step of dx/dt = f(t, x).
///
/// `State` is any type closed under `+` and scalar `*` (double, Eigen
/// vectors). Throws DivergenceError if any stage or the result is non-finite.
template <typename State, typename Rhs>
State rk4_step(Rhs&& f, const State& x, double t, double dt) {
  const double half = 0.5 * dt;
  const State k1 = f(t, x);
  if (!detail::all_finite(k1)) throw DivergenceError("rk4: non-finite stage", t);
  const State k2 = f(t + half, State(x + half * k1));
  if (!detail::all_finite(k2)) throw DivergenceError("rk4: non-finite stage", t);
  const State k3 = f(t + half, State(x + half * k2));
  if (!detail::all_finite(k3)) throw DivergenceError("rk4: non-finite stage", t);
  const State k4 = f(t + dt, State(x + dt * k3));
  if (!detail::all_finite(k4)) throw DivergenceError("rk4: non-finite stage", t);
  State next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!detail::all_finite(next)) throw DivergenceError("rk4: non-finite state", t);
  return next;
}

}  // namespace ttl
