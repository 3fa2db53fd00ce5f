#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::omp`; the library
// calls the OpenMP versions, tests and the benchmark compare the two.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>

#include "dwlab/modulus.hpp"

namespace dwlab::kernels {

using cplx = std::complex<double>;

/// Per-mode propagator entry: u' = k0 u + k1 v, v' = k0_dot u + k1_dot v.
struct PropagatorEntry {
  double k0, k1, k0_dot, k1_dot;
};

namespace serial {
double sum_abs(std::span<const double> x);
double sum_sq(std::span<const double> x);
double max_abs(std::span<const double> x);
double sum_pow(std::span<const double> x, double q);
std::optional<std::size_t> first_nonfinite(std::span<const double> x);
/// sum_m w_m |a_m|^2
double weighted_energy(std::span<const cplx> a, std::span<const double> w);
void apply_propagator(std::span<cplx> u_hat, std::span<cplx> v_hat,
                      std::span<const PropagatorEntry> table);
/// v += tau * h(u)
void kick(std::span<double> v, std::span<const double> u, double tau, const Nonlinearity& h);
/// out = h(u)
void nonlinear(std::span<double> out, std::span<const double> u, const Nonlinearity& h);
/// acc += c * f  (complex, pointwise real multiplier)
void axpy_multiplier(std::span<cplx> acc, std::span<const cplx> f,
                     std::span<const double> multiplier, double c);
}  // namespace serial

namespace omp {
double sum_abs(std::span<const double> x);
double sum_sq(std::span<const double> x);
double max_abs(std::span<const double> x);
double sum_pow(std::span<const double> x, double q);
std::optional<std::size_t> first_nonfinite(std::span<const double> x);
double weighted_energy(std::span<const cplx> a, std::span<const double> w);
void apply_propagator(std::span<cplx> u_hat, std::span<cplx> v_hat,
                      std::span<const PropagatorEntry> table);
void kick(std::span<double> v, std::span<const double> u, double tau, const Nonlinearity& h);
void nonlinear(std::span<double> out, std::span<const double> u, const Nonlinearity& h);
void axpy_multiplier(std::span<cplx> acc, std::span<const cplx> f,
                     std::span<const double> multiplier, double c);
}  // namespace omp

using omp::apply_propagator;
using omp::axpy_multiplier;
using omp::first_nonfinite;
using omp::kick;
using omp::max_abs;
using omp::nonlinear;
using omp::sum_abs;
using omp::sum_pow;
using omp::sum_sq;
using omp::weighted_energy;

}  // namespace dwlab::kernels
