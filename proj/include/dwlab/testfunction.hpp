#pragma once

// Cut-offs, weights and functionals of the test-function blow-up argument.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dwlab/modulus.hpp"
#include "dwlab/trajectory.hpp"

namespace dwlab::tf {

/// eta = 1 on [0, 1/2], 0 on [1, inf), exp-quotient smooth step between.
double eta(double s);
double eta_d1(double s);
double eta_d2(double s);
/// 0 on [0, 1/2], eta elsewhere (jumps at 1/2).
double eta_star(double s);

struct CutoffStats {
  double max_abs_d1 = 0.0;
  double max_abs_d2 = 0.0;
};
/// Sup of |eta'|, |eta''| on a fine grid of (1/2, 1).
CutoffStats cutoff_stats(int samples = 200001);

/// int_{max(s,1/2)}^{1} eta(tau)^{n+2} / tau dtau, i.e. the inner r-integral
/// of Y for a point with (|x|^2+t)/R = s. Tabulated once per n.
double inner_weight(double s, int n);

struct PsiWeights {
  double psi = 0.0;       // eta(sigma)^{n+2}
  double psi_star = 0.0;  // eta*(sigma)^{n+2}
  double dt = 0.0;
  double dtt = 0.0;
  double lap = 0.0;
};
/// Closed forms at (t, x) with sigma = (|x|^2 + t)/R; x has n entries.
PsiWeights psi_weights(double t, std::span<const double> x, double R, int n);

/// Smallest C with |d_tt psi - Lap psi - d_t psi| <= (C/R) psi*^{n/(n+2)} for
/// all R >= R0, found from a dense scan in sigma over the corners of the
/// (1/R, |x|^2/(sigma R)) box, then inflated by `margin` (relative).
double weight_constant(int n, double R0, double margin = 1e-3, int samples = 400001);

struct WeightBoundReport {
  double C = 0.0;
  /// max over the grid of R |E| / (C eta*^n)
  double max_ratio = 0.0;
  long points = 0;
  long violations = 0;
};
/// Checks the pointwise weight bound on an nt x nx^n grid covering Q_R.
WeightBoundReport check_weight_bound(int n, double R, double C, int nt, int nx);

/// Space-time samples flattened for the functionals: sigma-independent
/// weights a_p = h(|u|) * (time weight) * dx^n.
struct SpaceTimeSamples {
  int dim = 1;
  double t_end = 0.0;
  double x_reach = 0.0;  // half-length of the spatial box
  double R_max = 0.0;    // only points with |x|^2 + t < R_max are kept
  std::vector<double> t, r2, a;
};

/// Trapezoid weights over the snapshot times, Riemann in space.
SpaceTimeSamples collect_samples(const std::vector<Snapshot>& snaps, const Nonlinearity& h,
                                 double R_max);

/// I_R = int_{Q_R} h(|u|) psi_R. Throws if the samples do not cover Q_R.
double functional_IR(const SpaceTimeSamples& s, double R);

struct Functionals {
  std::vector<double> R;
  std::vector<double> I;
  std::vector<double> y;  // y(R) = int h(|u|) psi*_R
  std::vector<double> Y;  // int_0^R y(r)/r dr
  /// max_R Y(R) / (log 2 I_R) (0 where I_R = 0)
  double max_ratio_to_bound = 0.0;
  bool bound_holds = true;
};

/// y and Y on an increasing R grid. Y uses the exchanged order of
/// integration, Y(R) = sum_p a_p inner_weight(sigma_p / R).
Functionals functional_Y(const SpaceTimeSamples& s, const std::vector<double>& R_grid);

struct Certificate {
  int n = 1;
  double R0 = 16.0;
  double C_w = 0.0;
  double kappa = 0.0;  // |Q*_R| / R^{(n+2)/2}
  double A = 0.0;      // log 2 * C_w * kappa
  double c1 = 0.0, c2 = 0.0;
  double Y_R0 = 0.0;
  double rhs = 0.0;  // Y(R0)^{-2/n}
  std::vector<double> R;
  std::vector<double> lhs;  // c1 int_{R0}^{R} mu(c2 s^{-n/2}) / s ds
  /// Limit of lhs as R -> inf (inf when the Dini integral diverges).
  double lhs_limit = 0.0;
  bool witness = false;
  bool witness_in_grid = false;
  double log_R_witness = 0.0;
  double loglog_R_witness = 0.0;
  std::string verdict;
};

/// Evaluates both sides of the final integral inequality. `data_mass` is
/// int g dx of the data; non-positive mass or Y(R0) = 0 is rejected.
Certificate blowup_certificate(const Functionals& f, const Modulus& mu, int n, double R0,
                               double C_w, double data_mass);

struct JensenResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};
/// Phi(int u a / int a) against int Phi(u) a / int a (uniform cell weights).
JensenResult jensen_check(const std::function<double(double)>& phi, std::span<const double> u,
                          std::span<const double> alpha);

}  // namespace dwlab::tf
