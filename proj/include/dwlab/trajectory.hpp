#pragma once

#include <limits>
#include <string>
#include <vector>

#include "dwlab/grid.hpp"

namespace dwlab {

/// Norm diagnostics of one sample.
struct NormRecord {
  double t = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  double h1dot = 0.0;
  /// 1/2 ||u_t||^2 + 1/2 ||grad u||^2
  double energy = 0.0;
  /// ||h(u)||_{L^1}; zero for linear runs.
  double forcing = 0.0;
  /// Running sup of the X(t) weight sum up to and including t.
  double xnorm = 0.0;
};

enum class OutcomeKind { CompletedHorizon, BlewUpAt, StepCollapse };
std::string to_string(OutcomeKind k);

struct Outcome {
  OutcomeKind kind = OutcomeKind::CompletedHorizon;
  /// Detection time; +inf for CompletedHorizon.
  double t_est = std::numeric_limits<double>::infinity();
  std::string detail;
};

struct Snapshot {
  double t = 0.0;
  GridField u;
};

struct Trajectory {
  int dim = 1;
  std::vector<NormRecord> records;
  std::vector<Snapshot> snapshots;
  Outcome outcome;
  /// Trapezoid integral of ||h(u)||_{L^1} over the sampled times.
  double forcing_integral = 0.0;
  int steps = 0;
  int dt_halvings = 0;

  double xnorm() const { return records.empty() ? 0.0 : records.back().xnorm; }
};

}  // namespace dwlab
