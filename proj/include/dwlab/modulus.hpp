#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dwlab {

enum class ModulusKind { Power, LogPlus, InvLog, IterLog, Custom };
enum class DiniVerdict { Convergent, Divergent, Inconclusive };

std::string to_string(ModulusKind kind);
std::string to_string(DiniVerdict verdict);

/// A modulus of continuity mu: [0, inf) -> [0, inf).
///
/// Catalog kinds:
///   Power    mu(s) = s^p
///   LogPlus  mu(s) = log(1+s)^p
///   InvLog   mu(s) = log(1/s)^-p                                  (depth 0)
///   IterLog  mu(s) = prod_{j=1..k} (log^(j) 1/s)^-1 * (log^(k+1) 1/s)^-p
///   Custom   piecewise-linear table, mu(0) = 0
///
/// InvLog and IterLog follow the formula on (0, s*] and the tangent line
/// mu(s*) + mu'(s*)(s - s*) beyond s*. Immutable after construction.
class Modulus {
 public:
  static Modulus power(double p);
  static Modulus log_plus(double p);
  static Modulus inv_log(double p, std::optional<double> continuation_point = {});
  static Modulus iter_log(double p, int depth,
                          std::optional<double> continuation_point = {});
  static Modulus custom(std::vector<double> s, std::vector<double> mu,
                        std::string source = "table");
  static Modulus custom_from_file(const std::string& path);

  /// catalog_make: dispatch on kind. `depth` is only read for IterLog.
  static Modulus make(ModulusKind kind, double p, int depth = 1,
                      std::optional<double> continuation_point = {});

  double eval(double s) const;
  double operator()(double s) const { return eval(s); }

  /// Analytic derivative of order k in {1, 2}; finite differences for Custom.
  double deriv(double s, int k) const;
  /// Central second-order finite difference of order k in {1, 2}.
  double deriv_fd(double s, int k, std::optional<double> step = {}) const;

  /// log of the Dini integrand mu(t)/t dt after `level` logarithmic
  /// substitutions: level 0 integrates over w = log(1/t), level l over
  /// z_l = log z_{l-1}. Cancels the Jacobian symbolically for the log-chain
  /// kinds so deep levels stay finite.
  double log_dini_integrand(int level, double z) const;

  ModulusKind kind() const { return kind_; }
  double p() const { return p_; }
  int depth() const { return depth_; }
  /// +inf when no continuation is applied.
  double continuation_point() const { return s_star_; }
  std::optional<DiniVerdict> analytic_dini_label() const { return label_; }
  /// Canonical spec string, e.g. "invlog:p=1".
  std::string spec() const;

 private:
  Modulus() = default;
  void finish_log_chain(std::optional<double> continuation_point);
  double formula(double s) const;
  // s*mu'/mu and s^2*mu''/mu for the formula branch, as functions of w = log(1/s).
  std::array<double, 2> log_chain_ratios(double w) const;
  double formula_deriv(double s, int k) const;

  ModulusKind kind_ = ModulusKind::Power;
  double p_ = 1.0;
  int depth_ = 0;
  double s_star_ = 0.0;
  double mu_star_ = 0.0;
  double slope_star_ = 0.0;
  std::optional<DiniVerdict> label_;
  std::vector<double> table_s_, table_mu_;
  std::string source_;
};

/// Parse `power:p=1.0`, `logplus:p=2.0`, `invlog:p=1.0`,
/// `iterlog:p=1.0,depth=2`, `custom:<table-file>`. Optional `sstar=` key for
/// the log kinds. Throws std::invalid_argument on malformed input.
Modulus parse_modulus(std::string_view spec);

/// h(s) = |s|^q mu(|s|). q = 1 + 2/n for the critical family; a pure power
/// |s|^q (mu == 1) is available for engine checks below the critical exponent.
class Nonlinearity {
 public:
  Nonlinearity(Modulus modulus, int dimension);
  static Nonlinearity pure_power(double exponent, int dimension);

  double eval(double s) const;
  double operator()(double s) const { return eval(s); }
  /// d/ds h(|s|); sign(s) * h'(|s|).
  double deriv(double s) const;
  /// Inverse of h on [0, inf) by bracketing + bisection.
  double inverse(double y) const;

  const std::optional<Modulus>& modulus() const { return modulus_; }
  int dimension() const { return n_; }
  double exponent() const { return q_; }
  bool is_zero() const { return zero_; }
  std::string spec() const;

  static Nonlinearity zero(int dimension);

 private:
  Nonlinearity() = default;
  std::optional<Modulus> modulus_;
  int n_ = 1;
  double q_ = 3.0;
  bool zero_ = false;
};

/// Parse a nonlinearity spec: a modulus spec (critical exponent 1 + 2/n),
/// `pure:q=1.5`, or `zero`.
Nonlinearity parse_nonlinearity(std::string_view spec, int dimension);

struct ConditionReport {
  // [0] -> k = 1, [1] -> k = 2
  std::array<double, 2> max_ratio{0.0, 0.0};
  DiniVerdict dini_verdict = DiniVerdict::Inconclusive;
  std::optional<DiniVerdict> analytic_label;
  /// Dyadic shell contributions S_k = int_{a 2^-k-1}^{a 2^-k} mu(t)/t dt.
  std::vector<double> dini_partial_sums;
  /// Shell sequence at the condensation level that decided the verdict.
  std::vector<double> level_sums;
  int decision_level = -1;
  /// Estimate of int_0^a mu(t)/t dt for convergent verdicts.
  double integral_estimate = 0.0;
  /// Least-squares slope of log S_k against log k on the dyadic shells.
  double shell_loglog_slope = 0.0;
  double convexity_min = 0.0;
  bool convexity_pass = false;
  std::string diagnostic;
};

struct DiniOptions {
  int shells = 40;
  double c0 = 100.0;  // base a = 1/c0
  int max_level = 4;
  double tol = 1e-10;
};

ConditionReport check_slow_variation(const Modulus& mu, double s0, int grid_size);
ConditionReport classify_dini(const Modulus& mu, const DiniOptions& opts = {});
ConditionReport check_h_convexity(const Nonlinearity& h, double lo, double hi,
                                  int grid_size);

/// Default s0 of the slow-variation condition: min(s*, 0.1).
double default_s0(const Modulus& mu);

}  // namespace dwlab
