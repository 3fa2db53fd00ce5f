#include "dwlab/modulus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dwlab/quadrature.hpp"

namespace dwlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = std::numbers::ln2;

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// exp applied `times` times.
double iterated_exp(double x, int times) {
  for (int i = 0; i < times; ++i) x = std::exp(x);
  return x;
}

// log applied `times` times; NaN once an argument leaves (0, inf).
double iterated_log(double x, int times) {
  for (int i = 0; i < times; ++i) {
    if (!(x > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    x = std::log(x);
  }
  return x;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1));
  g.back() = hi;
  return g;
}

}  // namespace

std::string to_string(ModulusKind kind) {
  switch (kind) {
    case ModulusKind::Power: return "power";
    case ModulusKind::LogPlus: return "logplus";
    case ModulusKind::InvLog: return "invlog";
    case ModulusKind::IterLog: return "iterlog";
    case ModulusKind::Custom: return "custom";
  }
  return "unknown";
}

std::string to_string(DiniVerdict verdict) {
  switch (verdict) {
    case DiniVerdict::Convergent: return "Convergent";
    case DiniVerdict::Divergent: return "Divergent";
    case DiniVerdict::Inconclusive: return "Inconclusive";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Construction

Modulus Modulus::power(double p) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw std::invalid_argument("power modulus requires p > 0, got " + format_number(p));
  Modulus m;
  m.kind_ = ModulusKind::Power;
  m.p_ = p;
  m.s_star_ = kInf;
  m.label_ = DiniVerdict::Convergent;
  return m;
}

Modulus Modulus::log_plus(double p) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw std::invalid_argument("logplus modulus requires p > 0, got " + format_number(p));
  Modulus m;
  m.kind_ = ModulusKind::LogPlus;
  m.p_ = p;
  m.s_star_ = kInf;
  m.label_ = DiniVerdict::Convergent;
  return m;
}

Modulus Modulus::inv_log(double p, std::optional<double> continuation_point) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw std::invalid_argument("invlog modulus requires p > 0, got " + format_number(p));
  Modulus m;
  m.kind_ = ModulusKind::InvLog;
  m.p_ = p;
  m.depth_ = 0;
  m.label_ = p > 1.0 ? DiniVerdict::Convergent : DiniVerdict::Divergent;
  m.finish_log_chain(continuation_point);
  return m;
}

Modulus Modulus::iter_log(double p, int depth, std::optional<double> continuation_point) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw std::invalid_argument("iterlog modulus requires p > 0, got " + format_number(p));
  if (depth < 1) throw std::invalid_argument("iterlog modulus requires depth >= 1");
  Modulus m;
  m.kind_ = ModulusKind::IterLog;
  m.p_ = p;
  m.depth_ = depth;
  m.label_ = p > 1.0 ? DiniVerdict::Convergent : DiniVerdict::Divergent;
  m.finish_log_chain(continuation_point);
  return m;
}

Modulus Modulus::make(ModulusKind kind, double p, int depth,
                      std::optional<double> continuation_point) {
  switch (kind) {
    case ModulusKind::Power: return power(p);
    case ModulusKind::LogPlus: return log_plus(p);
    case ModulusKind::InvLog: return inv_log(p, continuation_point);
    case ModulusKind::IterLog: return iter_log(p, depth, continuation_point);
    case ModulusKind::Custom: break;
  }
  throw std::invalid_argument("custom moduli are built from a table");
}

Modulus Modulus::custom(std::vector<double> s, std::vector<double> mu, std::string source) {
  if (s.size() != mu.size() || s.empty())
    throw std::invalid_argument("custom modulus table needs matching, non-empty columns");
  if (s.front() > 0.0) {
    s.insert(s.begin(), 0.0);
    mu.insert(mu.begin(), 0.0);
  }
  if (s.front() != 0.0 || mu.front() != 0.0)
    throw std::invalid_argument("custom modulus table must start at mu(0) = 0");
  if (s.size() < 2) throw std::invalid_argument("custom modulus table needs a positive abscissa");
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s[i] > s[i - 1])) throw std::invalid_argument("custom modulus abscissae must increase");
    if (!(mu[i] >= mu[i - 1]) || !std::isfinite(mu[i]))
      throw std::invalid_argument("custom modulus values must be finite and non-decreasing");
  }
  Modulus m;
  m.kind_ = ModulusKind::Custom;
  m.p_ = 0.0;
  m.s_star_ = kInf;
  m.table_s_ = std::move(s);
  m.table_mu_ = std::move(mu);
  m.source_ = std::move(source);
  return m;
}

Modulus Modulus::custom_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open modulus table '" + path + "'");
  std::vector<double> s, mu;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    double a, b;
    if (!(ls >> a)) continue;
    if (!(ls >> b)) throw std::invalid_argument("modulus table row needs two columns: " + line);
    s.push_back(a);
    mu.push_back(b);
  }
  return custom(std::move(s), std::move(mu), path);
}

void Modulus::finish_log_chain(std::optional<double> continuation_point) {
  const int k = depth_;
  // Smallest w = log(1/s) with all nested logs >= 1, and at least 2.
  const double w_base = std::max(2.0, iterated_exp(1.0, k));
  double w_star;
  if (continuation_point) {
    const double cp = *continuation_point;
    if (!(cp > 0.0 && cp < 1.0))
      throw std::invalid_argument("continuation point must lie in (0, 1)");
    w_star = -std::log(cp);
    // Every nested log up to z_k must be positive for the formula to exist.
    double z = w_star;
    for (int j = 0; j < k; ++j) {
      if (!(z > 1.0)) throw std::invalid_argument("continuation point outside the formula domain");
      z = std::log(z);
    }
    if (!(z > 0.0)) throw std::invalid_argument("continuation point outside the formula domain");
  } else {
    // Largest s <= e^{-w_base} below which mu'' <= 0: the tangent continuation
    // beyond that point keeps mu concave on [0, inf).
    auto r2 = [&](double w) { return log_chain_ratios(w)[1]; };
    double last_positive = -1.0;
    double w = w_base;
    const double factor = 1.02;
    for (int i = 0; i < 2000; ++i, w *= factor)
      if (r2(w) > 0.0) last_positive = w;
    if (last_positive < 0.0) {
      w_star = w_base;
    } else {
      double lo = last_positive, hi = last_positive * factor;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (r2(mid) > 0.0 ? lo : hi) = mid;
      }
      w_star = hi;
    }
  }
  s_star_ = std::exp(-w_star);
  mu_star_ = formula(s_star_);
  slope_star_ = formula_deriv(s_star_, 1);
}

// ---------------------------------------------------------------------------
// Evaluation

double Modulus::formula(double s) const {
  if (s <= 0.0) return 0.0;
  switch (kind_) {
    case ModulusKind::Power: return std::pow(s, p_);
    case ModulusKind::LogPlus: return std::pow(std::log1p(s), p_);
    case ModulusKind::InvLog:
    case ModulusKind::IterLog: {
      double z = -std::log(s);
      double log_mu = 0.0;
      for (int j = 1; j <= depth_ + 1; ++j) {
        z = std::log(z);
        log_mu -= (j <= depth_ ? 1.0 : p_) * z;
      }
      return std::exp(log_mu);
    }
    case ModulusKind::Custom: break;
  }
  const auto it = std::upper_bound(table_s_.begin(), table_s_.end(), s);
  std::size_t i = static_cast<std::size_t>(it - table_s_.begin());
  if (i >= table_s_.size()) i = table_s_.size() - 1;
  const double s0 = table_s_[i - 1], s1 = table_s_[i];
  const double m0 = table_mu_[i - 1], m1 = table_mu_[i];
  return m0 + (m1 - m0) * (s - s0) / (s1 - s0);
}

std::array<double, 2> Modulus::log_chain_ratios(double w) const {
  // z_0 = w, z_j = log z_{j-1}; alpha_j = s dz_j/ds = -1/prod_{i<j} z_i.
  const int top = depth_ + 1;
  std::vector<double> z(top + 1), alpha(top + 1), sigma(top + 1);
  z[0] = w;
  for (int j = 1; j <= top; ++j) z[j] = std::log(z[j - 1]);
  double prod = 1.0, acc = 0.0;
  for (int j = 0; j <= top; ++j) {
    alpha[j] = -1.0 / prod;
    sigma[j] = acc;  // sum_{i<j} alpha_i / z_i
    acc += alpha[j] / z[j];
    prod *= z[j];
  }
  double r1 = 0.0, s2L2 = 0.0;
  for (int j = 1; j <= top; ++j) {
    const double c = j <= depth_ ? 1.0 : p_;
    const double s2b = -alpha[j] - alpha[j] * sigma[j];
    r1 -= c * alpha[j];
    s2L2 -= c * s2b;
  }
  return {r1, s2L2 + r1 * r1};
}

double Modulus::formula_deriv(double s, int k) const {
  switch (kind_) {
    case ModulusKind::Power:
      return k == 1 ? p_ * std::pow(s, p_ - 1.0) : p_ * (p_ - 1.0) * std::pow(s, p_ - 2.0);
    case ModulusKind::LogPlus: {
      const double l = std::log1p(s);
      const double d = 1.0 / (1.0 + s);
      if (k == 1) return p_ * std::pow(l, p_ - 1.0) * d;
      return p_ * (p_ - 1.0) * std::pow(l, p_ - 2.0) * d * d - p_ * std::pow(l, p_ - 1.0) * d * d;
    }
    case ModulusKind::InvLog:
    case ModulusKind::IterLog: {
      const auto r = log_chain_ratios(-std::log(s));
      return formula(s) * r[k - 1] / (k == 1 ? s : s * s);
    }
    case ModulusKind::Custom: break;
  }
  return deriv_fd(s, k);
}

double Modulus::eval(double s) const {
  s = std::abs(s);
  if (s == 0.0) return 0.0;
  if (kind_ == ModulusKind::InvLog || kind_ == ModulusKind::IterLog) {
    if (s >= s_star_) return mu_star_ + slope_star_ * (s - s_star_);
  }
  return formula(s);
}

double Modulus::deriv(double s, int k) const {
  if (!(s > 0.0)) throw std::invalid_argument("modulus derivatives need s > 0");
  if (k != 1 && k != 2) throw std::invalid_argument("modulus derivative order must be 1 or 2");
  if (kind_ == ModulusKind::Custom) return deriv_fd(s, k);
  if ((kind_ == ModulusKind::InvLog || kind_ == ModulusKind::IterLog) && s >= s_star_)
    return k == 1 ? slope_star_ : 0.0;
  return formula_deriv(s, k);
}

double Modulus::deriv_fd(double s, int k, std::optional<double> step) const {
  if (!(s > 0.0)) throw std::invalid_argument("modulus derivatives need s > 0");
  // Second differences lose eps/h^2; they take a larger default step.
  double h = step ? *step : (k == 1 ? std::max(1e-6 * s, 1e-12) : std::max(1e-4 * s, 1e-12));
  h = std::min(h, 0.5 * s);
  const double fp = eval(s + h), fm = eval(s - h);
  if (k == 1) return (fp - fm) / (2.0 * h);
  return (fp - 2.0 * eval(s) + fm) / (h * h);
}

double Modulus::log_dini_integrand(int level, double z) const {
  const bool chain = kind_ == ModulusKind::InvLog || kind_ == ModulusKind::IterLog;
  // Walk up to w = z_0, accumulating the Jacobian sum_{j=1..level} z_j.
  double w = z, jac = 0.0;
  for (int j = level; j >= 1; --j) {
    jac += w;
    w = std::exp(w);
  }
  const double w_star = std::isfinite(s_star_) ? -std::log(s_star_) : 0.0;
  if (chain && !(w < w_star)) {
    const int k = depth_;
    if (level <= k) {
      double cur = z, total = 0.0;
      for (int j = level + 1; j <= k + 1; ++j) {
        cur = std::log(cur);
        total -= (j <= k ? 1.0 : p_) * cur;
      }
      return total;
    }
    // z_{k+1} .. z_level from the top.
    double cur = z, total = 0.0;
    for (int j = level; j >= k + 2; --j) {
      total += cur;
      cur = std::exp(cur);
    }
    if (p_ != 1.0) total += (1.0 - p_) * cur;
    return total;
  }
  if (!std::isfinite(w)) return -kInf;
  double log_mu;
  switch (kind_) {
    case ModulusKind::Power: log_mu = -p_ * w; break;
    case ModulusKind::LogPlus: log_mu = p_ * std::log(std::log1p(std::exp(-w))); break;
    default: {
      const double v = eval(std::exp(-w));
      log_mu = v > 0.0 ? std::log(v) : -kInf;
    }
  }
  return log_mu + jac;
}

std::string Modulus::spec() const {
  std::string out = to_string(kind_);
  if (kind_ == ModulusKind::Custom) return out + ":" + source_;
  out += ":p=" + format_number(p_);
  if (kind_ == ModulusKind::IterLog) out += ",depth=" + std::to_string(depth_);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& text, const std::string& key) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw std::invalid_argument("bad numeric value '" + text + "' for " + key);
  return v;
}

std::map<std::string, std::string> parse_params(std::string_view body) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    const auto comma = body.find(',', pos);
    const auto item = trim(body.substr(pos, comma == std::string_view::npos ? body.size() - pos
                                                                            : comma - pos));
    if (!item.empty()) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + item + "'");
      out[lower(trim(item.substr(0, eq)))] = trim(item.substr(eq + 1));
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

Modulus parse_modulus(std::string_view spec_text) {
  const std::string spec = trim(spec_text);
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("modulus spec needs 'kind:params', got '" + spec + "'");
  const std::string kind = lower(trim(spec.substr(0, colon)));
  const std::string body = spec.substr(colon + 1);
  if (kind == "custom") {
    if (trim(body).empty()) throw std::invalid_argument("custom modulus needs a table file");
    return Modulus::custom_from_file(trim(body));
  }
  auto params = parse_params(body);
  auto take = [&](const std::string& key) -> std::optional<double> {
    auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    const double v = parse_double(it->second, key);
    params.erase(it);
    return v;
  };
  const auto p = take("p");
  if (!p) throw std::invalid_argument("modulus spec '" + spec + "' is missing p");
  const auto sstar = take("sstar");
  std::optional<double> depth;
  if (kind == "iterlog") depth = take("depth");
  if (!params.empty())
    throw std::invalid_argument("unknown modulus parameter '" + params.begin()->first + "'");

  if (kind == "power") return Modulus::power(*p);
  if (kind == "logplus") return Modulus::log_plus(*p);
  if (kind == "invlog") return Modulus::inv_log(*p, sstar);
  if (kind == "iterlog") {
    const double d = depth.value_or(1.0);
    if (d != std::floor(d) || d < 1.0)
      throw std::invalid_argument("iterlog depth must be a positive integer");
    return Modulus::iter_log(*p, static_cast<int>(d), sstar);
  }
  throw std::invalid_argument("unknown modulus kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Nonlinearity

Nonlinearity::Nonlinearity(Modulus modulus, int dimension)
    : modulus_(std::move(modulus)), n_(dimension), q_(1.0 + 2.0 / dimension) {
  if (dimension != 1 && dimension != 2) throw std::invalid_argument("dimension must be 1 or 2");
}

Nonlinearity Nonlinearity::pure_power(double exponent, int dimension) {
  if (!(exponent >= 1.0)) throw std::invalid_argument("pure power exponent must be >= 1");
  if (dimension != 1 && dimension != 2) throw std::invalid_argument("dimension must be 1 or 2");
  Nonlinearity h;
  h.n_ = dimension;
  h.q_ = exponent;
  return h;
}

Nonlinearity Nonlinearity::zero(int dimension) {
  if (dimension != 1 && dimension != 2) throw std::invalid_argument("dimension must be 1 or 2");
  Nonlinearity h;
  h.n_ = dimension;
  h.q_ = 1.0 + 2.0 / dimension;
  h.zero_ = true;
  return h;
}

double Nonlinearity::eval(double s) const {
  if (zero_) return 0.0;
  const double a = std::abs(s);
  if (a == 0.0) return 0.0;
  const double mu = modulus_ ? modulus_->eval(a) : 1.0;
  return std::pow(a, q_) * mu;
}

double Nonlinearity::deriv(double s) const {
  if (zero_) return 0.0;
  const double a = std::abs(s);
  if (a == 0.0) return 0.0;
  const double sign = s < 0.0 ? -1.0 : 1.0;
  if (!modulus_) return sign * q_ * std::pow(a, q_ - 1.0);
  const double mu = modulus_->eval(a);
  const double dmu = modulus_->deriv(a, 1);
  return sign * (q_ * std::pow(a, q_ - 1.0) * mu + std::pow(a, q_) * dmu);
}

double Nonlinearity::inverse(double y) const {
  if (zero_) throw std::domain_error("the zero nonlinearity has no inverse");
  if (!(y > 0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 2000 && eval(hi) < y; ++i) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 300 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (eval(mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string Nonlinearity::spec() const {
  if (zero_) return "zero";
  if (modulus_) return modulus_->spec();
  return "pure:q=" + format_number(q_);
}

Nonlinearity parse_nonlinearity(std::string_view spec_text, int dimension) {
  const std::string spec = trim(spec_text);
  if (lower(spec) == "zero") return Nonlinearity::zero(dimension);
  if (lower(spec).rfind("pure:", 0) == 0) {
    auto params = parse_params(spec.substr(5));
    auto it = params.find("q");
    if (it == params.end() || params.size() != 1)
      throw std::invalid_argument("pure nonlinearity spec is 'pure:q=<exponent>'");
    return Nonlinearity::pure_power(parse_double(it->second, "q"), dimension);
  }
  return Nonlinearity(parse_modulus(spec), dimension);
}

// ---------------------------------------------------------------------------
// Condition checks

double default_s0(const Modulus& mu) { return std::min(mu.continuation_point(), 0.1); }

ConditionReport check_slow_variation(const Modulus& mu, double s0, int grid_size) {
  if (!(s0 > 0.0)) throw std::invalid_argument("s0 must be positive");
  if (grid_size < 100) throw std::invalid_argument("slow-variation grid needs >= 100 points");
  ConditionReport rep;
  rep.analytic_label = mu.analytic_dini_label();
  for (double s : log_grid(s0 * 1e-8, s0, grid_size)) {
    const double m = mu.eval(s);
    if (!(m > 0.0))
      throw std::invalid_argument("modulus vanishes at interior point s = " + format_number(s));
    for (int k = 1; k <= 2; ++k) {
      const double r = std::pow(s, k) * std::abs(mu.deriv(s, k)) / m;
      rep.max_ratio[k - 1] = std::max(rep.max_ratio[k - 1], r);
    }
  }
  return rep;
}

namespace {

enum class LevelCall { Convergent, Divergent, Descend, Failed };

struct LevelResult {
  std::vector<double> sums;
  LevelCall call = LevelCall::Failed;
  std::string note;
};

LevelResult run_level(const Modulus& mu, int level, double z_start, const DiniOptions& opts) {
  LevelResult out;
  auto f = [&](double z) { return std::exp(mu.log_dini_integrand(level, z)); };
  for (int j = 0; j < opts.shells; ++j) {
    const double a = z_start + j * kLn2;
    auto r = quad::integrate(f, a, a + kLn2, 0.0, opts.tol);
    if (!r.finite || !std::isfinite(r.value) || r.value < 0.0) {
      out.note = "shell quadrature produced a non-finite value at level " +
                 std::to_string(level) + ", shell " + std::to_string(j);
      return out;
    }
    out.sums.push_back(r.value);
  }
  const int half = opts.shells / 2;
  bool all_zero = true;
  double max_ratio = 0.0, min_ratio = kInf;
  for (int j = half; j + 1 < opts.shells; ++j) {
    if (out.sums[j] != 0.0 || out.sums[j + 1] != 0.0) all_zero = false;
    if (out.sums[j] == 0.0) {
      if (out.sums[j + 1] == 0.0) continue;
      max_ratio = kInf;
      continue;
    }
    const double rho = out.sums[j + 1] / out.sums[j];
    max_ratio = std::max(max_ratio, rho);
    min_ratio = std::min(min_ratio, rho);
  }
  if (all_zero || max_ratio <= 0.9) {
    out.call = LevelCall::Convergent;
  } else if (min_ratio >= 1.0 - 1e-6) {
    out.call = LevelCall::Divergent;
  } else {
    out.call = LevelCall::Descend;
  }
  return out;
}

// Partial sum over the first m shells plus a geometric tail.
double tail_estimate(const std::vector<double>& sums, int m) {
  double total = 0.0;
  for (int j = 0; j < m; ++j) total += sums[j];
  if (m >= 2 && sums[m - 2] > 0.0) {
    const double rho = sums[m - 1] / sums[m - 2];
    if (rho < 1.0) total += sums[m - 1] * rho / (1.0 - rho);
  }
  return total;
}

}  // namespace

ConditionReport classify_dini(const Modulus& mu, const DiniOptions& opts) {
  if (opts.shells < 40) throw std::invalid_argument("classifier needs >= 40 shells");
  if (!(opts.c0 > 1.0)) throw std::invalid_argument("C0 must exceed 1");
  ConditionReport rep;
  rep.analytic_label = mu.analytic_dini_label();
  const double w0 = std::log(opts.c0);
  const double w_star = std::isfinite(mu.continuation_point()) ? -std::log(mu.continuation_point()) : 0.0;

  auto level0 = [&](double w) { return std::exp(mu.log_dini_integrand(0, w)); };

  for (int level = 0; level <= opts.max_level; ++level) {
    double w_start = w0;
    if (level >= 1) w_start = std::max({w0, w_star, iterated_exp(1.0, level - 1)});
    const double z_start = iterated_log(w_start, level);
    if (!std::isfinite(z_start)) {
      rep.diagnostic = "level " + std::to_string(level) + " start point undefined";
      break;
    }
    auto res = run_level(mu, level, z_start, opts);
    if (level == 0) {
      rep.dini_partial_sums = res.sums;
      // log S_k against log k for k >= 1 (reported only).
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int cnt = 0;
      for (std::size_t k = 1; k < res.sums.size(); ++k) {
        if (!(res.sums[k] > 0.0)) continue;
        const double x = std::log(static_cast<double>(k)), y = std::log(res.sums[k]);
        sx += x; sy += y; sxx += x * x; sxy += x * y; ++cnt;
      }
      if (cnt >= 2) rep.shell_loglog_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    }
    if (res.call == LevelCall::Failed) {
      rep.diagnostic = res.note;
      rep.level_sums = res.sums;
      rep.decision_level = level;
      rep.dini_verdict = DiniVerdict::Inconclusive;
      return rep;
    }
    if (res.call == LevelCall::Descend) continue;

    rep.level_sums = res.sums;
    rep.decision_level = level;
    if (res.call == LevelCall::Divergent) {
      rep.dini_verdict = DiniVerdict::Divergent;
      rep.integral_estimate = kInf;
      rep.diagnostic = "shell sums bounded below at condensation level " + std::to_string(level);
      return rep;
    }
    double pre = 0.0;
    if (w_start > w0) {
      auto r = quad::integrate(level0, w0, w_start, 0.0, opts.tol);
      pre = r.value;
    }
    const int m = static_cast<int>(res.sums.size());
    const double full = pre + tail_estimate(res.sums, m);
    const double halfway = pre + tail_estimate(res.sums, m / 2);
    rep.integral_estimate = full;
    if (full > 0.0 && std::abs(full - halfway) > 1e-3 * std::abs(full)) {
      rep.dini_verdict = DiniVerdict::Inconclusive;
      rep.diagnostic = "geometric decay but unstable tail estimate";
      return rep;
    }
    rep.dini_verdict = DiniVerdict::Convergent;
    rep.diagnostic = "geometric shell decay at condensation level " + std::to_string(level);
    return rep;
  }
  rep.dini_verdict = DiniVerdict::Inconclusive;
  if (rep.diagnostic.empty()) rep.diagnostic = "no decision up to the maximum condensation level";
  return rep;
}

ConditionReport check_h_convexity(const Nonlinearity& h, double lo, double hi, int grid_size) {
  if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("convexity interval must satisfy 0 < lo < hi");
  if (grid_size < 2) throw std::invalid_argument("convexity grid needs >= 2 points");
  ConditionReport rep;
  const double q = h.exponent();
  double mn = kInf;
  for (double s : log_grid(lo, hi, grid_size)) {
    double bracket;
    if (h.is_zero()) {
      bracket = 0.0;
    } else if (h.modulus()) {
      const auto& mu = *h.modulus();
      bracket = q * (q - 1.0) * mu.eval(s) + 2.0 * q * s * mu.deriv(s, 1) + s * s * mu.deriv(s, 2);
    } else {
      bracket = q * (q - 1.0);
    }
    mn = std::min(mn, bracket);
  }
  rep.convexity_min = mn;
  rep.convexity_pass = mn >= -1e-10;
  if (h.modulus()) rep.analytic_label = h.modulus()->analytic_dini_label();
  return rep;
}

}  // namespace dwlab
