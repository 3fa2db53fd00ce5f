#include "dwlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dwlab::kernels {

namespace serial {

double sum_abs(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

double sum_sq(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double sum_pow(std::span<const double> x, double q) {
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v), q);
  return s;
}

std::optional<std::size_t> first_nonfinite(std::span<const double> x) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i])) return i;
  return std::nullopt;
}

double weighted_energy(std::span<const cplx> a, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * std::norm(a[i]);
  return s;
}

void apply_propagator(std::span<cplx> u_hat, std::span<cplx> v_hat,
                      std::span<const PropagatorEntry> table) {
  for (std::size_t i = 0; i < u_hat.size(); ++i) {
    const auto& e = table[i];
    const cplx u = u_hat[i], v = v_hat[i];
    u_hat[i] = e.k0 * u + e.k1 * v;
    v_hat[i] = e.k0_dot * u + e.k1_dot * v;
  }
}

void kick(std::span<double> v, std::span<const double> u, double tau, const Nonlinearity& h) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += tau * h.eval(u[i]);
}

void nonlinear(std::span<double> out, std::span<const double> u, const Nonlinearity& h) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = h.eval(u[i]);
}

void axpy_multiplier(std::span<cplx> acc, std::span<const cplx> f,
                     std::span<const double> multiplier, double c) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += (c * multiplier[i]) * f[i];
}

}  // namespace serial

namespace omp {

using index_t = std::ptrdiff_t;

double sum_abs(std::span<const double> x) {
  const index_t n = static_cast<index_t>(x.size());
  double s = 0.0;
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (index_t i = 0; i < n; ++i) s += std::abs(x[i]);
  return s;
}

double sum_sq(std::span<const double> x) {
  const index_t n = static_cast<index_t>(x.size());
  double s = 0.0;
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (index_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

double max_abs(std::span<const double> x) {
  const index_t n = static_cast<index_t>(x.size());
  double m = 0.0;
#pragma omp parallel for reduction(max : m) schedule(static)
  for (index_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

double sum_pow(std::span<const double> x, double q) {
  const index_t n = static_cast<index_t>(x.size());
  double s = 0.0;
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (index_t i = 0; i < n; ++i) s += std::pow(std::abs(x[i]), q);
  return s;
}

std::optional<std::size_t> first_nonfinite(std::span<const double> x) {
  const index_t n = static_cast<index_t>(x.size());
  index_t first = n;
#pragma omp parallel for reduction(min : first) schedule(static)
  for (index_t i = 0; i < n; ++i)
    if (!std::isfinite(x[i])) first = std::min(first, i);
  if (first == n) return std::nullopt;
  return static_cast<std::size_t>(first);
}

double weighted_energy(std::span<const cplx> a, std::span<const double> w) {
  const index_t n = static_cast<index_t>(a.size());
  double s = 0.0;
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (index_t i = 0; i < n; ++i) s += w[i] * std::norm(a[i]);
  return s;
}

void apply_propagator(std::span<cplx> u_hat, std::span<cplx> v_hat,
                      std::span<const PropagatorEntry> table) {
  const index_t n = static_cast<index_t>(u_hat.size());
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < n; ++i) {
    const auto& e = table[i];
    const cplx u = u_hat[i], v = v_hat[i];
    u_hat[i] = e.k0 * u + e.k1 * v;
    v_hat[i] = e.k0_dot * u + e.k1_dot * v;
  }
}

void kick(std::span<double> v, std::span<const double> u, double tau, const Nonlinearity& h) {
  const index_t n = static_cast<index_t>(v.size());
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < n; ++i) v[i] += tau * h.eval(u[i]);
}

void nonlinear(std::span<double> out, std::span<const double> u, const Nonlinearity& h) {
  const index_t n = static_cast<index_t>(out.size());
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < n; ++i) out[i] = h.eval(u[i]);
}

void axpy_multiplier(std::span<cplx> acc, std::span<const cplx> f,
                     std::span<const double> multiplier, double c) {
  const index_t n = static_cast<index_t>(acc.size());
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < n; ++i) acc[i] += (c * multiplier[i]) * f[i];
}

}  // namespace omp

}  // namespace dwlab::kernels
