#pragma once

// Strang-split integrator for u_tt - Lap u + u_t = h(u), Picard/Duhamel
// cross-check and lifespan sweeps.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "dwlab/data.hpp"
#include "dwlab/linear.hpp"
#include "dwlab/modulus.hpp"
#include "dwlab/trajectory.hpp"

namespace dwlab {

/// Raised by step() when the new state holds NaN or inf.
struct BlowupSignal : std::runtime_error {
  double t;
  explicit BlowupSignal(double time)
      : std::runtime_error("non-finite state at t = " + std::to_string(time)), t(time) {}
};

struct EvolveConfig {
  GridSpec grid;
  Nonlinearity h = Nonlinearity::zero(1);
  WaveState data;
  double dt = 0.05;
  double t_max = 1.0;
  double blowup_threshold = 1e6;
  double dt_min = 1e-10;
  /// Samples every sample_stride base steps, i.e. every sample_stride * dt.
  int sample_stride = 10;
  /// Growth control only engages once ||u||_inf is at least this large.
  double growth_floor = 1.0;
  /// Keep u every k-th sample (0 = none).
  int snapshot_every = 0;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  double sample_interval() const { return sample_stride * dt; }
};

/// One Strang step: half kick, exact linear flow, half kick. Caches the
/// linear tables per step size.
class Stepper {
 public:
  Stepper(const GridSpec& grid, Nonlinearity h);
  WaveState step(const WaveState& s, double dt);
  const Nonlinearity& nonlinearity() const { return h_; }

 private:
  GridSpec grid_;
  Nonlinearity h_;
  std::map<double, std::unique_ptr<LinearPropagator>> cache_;
};

/// Convenience one-shot step.
WaveState step(const WaveState& s, double dt, const Nonlinearity& h);

Trajectory evolve(const EvolveConfig& cfg);

/// Running X(t) supremum of a trajectory.
double xnorm(const Trajectory& tr);

struct PicardReport {
  int iterations = 0;
  /// X(window) norm of u^{k+1} - u^k for k = 0, 1, ...
  std::vector<double> corrections;
  /// Largest ratio of consecutive corrections above the noise floor.
  double contraction_factor = 0.0;
  double noise_floor = 0.0;
  /// ||u^K(T) - u_split(T)||_inf
  double mismatch_linf = 0.0;
  double lin_xnorm = 0.0;
};

/// Picard iterates of the Duhamel map on [0, window_T] with the trapezoid
/// rule at the config's dt; compares the last iterate with the split step.
PicardReport picard_verify(const EvolveConfig& cfg, double window_T, int iterations);

struct SweepJob {
  Nonlinearity h = Nonlinearity::zero(1);
  double epsilon = 0.0;
};

struct SweepRow {
  std::size_t index = 0;
  std::string nonlinearity;
  double epsilon = 0.0;
  bool ok = false;
  std::string error;
  Outcome outcome;
  double forcing_integral = 0.0;
  double final_linf = 0.0;
  double xnorm = 0.0;
  Trajectory trajectory;  // records only
};

/// Runs every job on a pool of `workers` threads. `base` supplies grid,
/// steps and horizon; the data is rebuilt from `shape` at each epsilon.
/// Rows come back in job order. A failing run is flagged, not fatal.
std::vector<SweepRow> run_sweep(const EvolveConfig& base, const DataSpec& shape,
                                const std::vector<SweepJob>& jobs, int workers,
                                const std::function<void(const SweepRow&)>& on_done = {});

/// Single-nonlinearity sweep over increasing amplitudes.
std::vector<SweepRow> lifespan_sweep(const EvolveConfig& base, const DataSpec& shape,
                                     const std::vector<double>& epsilons, int workers);

}  // namespace dwlab
