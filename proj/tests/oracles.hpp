#pragma once

// Reference computations for the tests. Nothing here calls into dwlab
// numerics: quadrature and ODE solves go through Boost.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/numeric/odeint.hpp>
#include <array>
#include <cmath>
#include <complex>
#include <functional>

namespace oracle {

inline double gk(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, tol);
}

/// Endpoint-singular integrands.
inline double ts(const std::function<double(double)>& f, double a, double b) {
  static boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate(f, a, b);
}

/// Damped oscillator multipliers from the two-root formula in long double.
/// Invalid inside the resonant band (double root).
struct Mult {
  double k0, k1, k0_dot, k1_dot;
};
inline Mult two_root(double xi, double t) {
  using C = std::complex<long double>;
  const long double q = 0.25L - static_cast<long double>(xi) * xi;
  const C d = std::sqrt(C(q, 0.0L));
  const C lp = C(-0.5L, 0.0L) + d, lm = C(-0.5L, 0.0L) - d;
  const C ep = std::exp(lp * static_cast<long double>(t)), em = std::exp(lm * static_cast<long double>(t));
  const C k1 = (ep - em) / (lp - lm);
  const C k0 = (lp * em - lm * ep) / (lp - lm);
  const C k1d = (lp * ep - lm * em) / (lp - lm);
  const C k0d = (lp * lm * em - lm * lp * ep) / (lp - lm);
  return {static_cast<double>(k0.real()), static_cast<double>(k1.real()),
          static_cast<double>(k0d.real()), static_cast<double>(k1d.real())};
}

/// u'' + u' = h(u) from (u0, v0) over [0, T], dopri5 at tight tolerance.
inline std::array<double, 2> scalar_ode(const std::function<double(double)>& h, double u0,
                                        double v0, double T) {
  using S = std::array<double, 2>;
  namespace ode = boost::numeric::odeint;
  S y{u0, v0};
  auto rhs = [&](const S& s, S& d, double) {
    d[0] = s[1];
    d[1] = h(s[0]) - s[1];
  };
  ode::integrate_adaptive(ode::make_controlled(1e-14, 1e-14, ode::runge_kutta_dopri5<S>()), rhs,
                          y, 0.0, T, 1e-3);
  return y;
}

}  // namespace oracle
