#pragma once

#include <stdexcept>

#include "pursuit/linalg.hpp"

namespace pursuit {

enum class Integrator { Rk4, Euler };

/// One classical RK4 step of xdot = f(t, x).
template <typename F>
VecX rk4_step(F&& f, double t, const VecX& x, double dt) {
  const VecX k1 = f(t, x);
  const VecX k2 = f(t + 0.5 * dt, VecX(x + 0.5 * dt * k1));
  const VecX k3 = f(t + 0.5 * dt, VecX(x + 0.5 * dt * k2));
  const VecX k4 = f(t + dt, VecX(x + dt * k3));
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <typename F>
VecX euler_step(F&& f, double t, const VecX& x, double dt) {
  return x + dt * f(t, x);
}

template <typename F>
VecX integrate_step(Integrator method, F&& f, double t, const VecX& x, double dt) {
  switch (method) {
    case Integrator::Rk4: return rk4_step(f, t, x, dt);
    case Integrator::Euler: return euler_step(f, t, x, dt);
  }
  throw std::logic_error("integrate_step: unknown integrator");
}

}  // namespace pursuit
