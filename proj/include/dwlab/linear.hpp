#pragma once

// Exact Fourier-multiplier flow of u_tt - Lap u + u_t = 0.

#include <complex>
#include <string>
#include <vector>

#include "dwlab/grid.hpp"
#include "dwlab/kernels.hpp"
#include "dwlab/trajectory.hpp"

namespace dwlab {

enum class Regime { LowFreq, Resonant, HighFreq };
std::string to_string(Regime r);

/// Half-width of the band around |xi| = 1/2 tagged Resonant.
inline constexpr double kResonantHalfWidth = 1e-4;

/// Roots of lambda^2 + lambda + |xi|^2 = 0.
struct PropagatorSymbols {
  cplx lambda_plus;
  cplx lambda_minus;
  Regime regime;
};
PropagatorSymbols symbols(double xi_abs);

/// u_hat(t) = k0 phi_hat + k1 psi_hat, plus the time derivatives.
using Multipliers = kernels::PropagatorEntry;
Multipliers multipliers(double xi_abs, double t);
/// Same, from |xi|^2 directly (what the grid tables store).
Multipliers multipliers_xi2(double xi2, double t);

/// Per-mode table for a fixed grid and step; reusable across steps.
class LinearPropagator {
 public:
  LinearPropagator(const GridSpec& spec, double dt);
  double dt() const { return dt_; }
  const GridSpec& spec() const { return spec_; }
  std::span<const kernels::PropagatorEntry> table() const { return table_; }
  /// In-place flow of spectra by dt.
  void apply(std::vector<cplx>& u_hat, std::vector<cplx>& v_hat) const;
  WaveState operator()(const WaveState& s) const;

 private:
  GridSpec spec_;
  double dt_;
  std::vector<kernels::PropagatorEntry> table_;
};

/// Exact linear flow of `state` by dt >= 0.
WaveState propagate(const WaveState& state, double dt);

/// Norms of one state. `h` feeds the forcing column; pass nullptr to skip.
NormRecord measure(const WaveState& s, const Nonlinearity* h = nullptr);

/// Running X(t) weight sum at one sample (no sup).
double xnorm_term(const NormRecord& r, int n);

/// Samples the exact linear solution at `times` (each propagated from t = 0).
Trajectory linear_trajectory(const WaveState& data, const std::vector<double>& times,
                             bool keep_snapshots = false);

/// `count` log-spaced times in [t0, t1] (inclusive), t0 > 0.
std::vector<double> log_times(double t0, double t1, int count);

enum class NormName { L1, L2, Linf, H1dot, Energy };
std::string to_string(NormName n);
NormName parse_norm_name(const std::string& s);

struct DecayFit {
  NormName norm = NormName::Linf;
  double t_min = 0.0, t_max = 0.0;
  double exponent = 0.0;
  /// RMS residual of the log-log least-squares line.
  double residual = 0.0;
  int samples = 0;
};

/// Least-squares slope of log(norm) against log(1 + t) over [t_min, t_max].
/// Needs >= 20 samples spanning a decade of (1 + t) with positive norms.
DecayFit decay_fit(const std::vector<NormRecord>& records, NormName norm, double t_min,
                   double t_max);

double norm_value(const NormRecord& r, NormName n);

}  // namespace dwlab
