#include "dwlab/linear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dwlab {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::LowFreq: return "LowFreq";
    case Regime::Resonant: return "Resonant";
    case Regime::HighFreq: return "HighFreq";
  }
  return "?";
}

std::string to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::CompletedHorizon: return "CompletedHorizon";
    case OutcomeKind::BlewUpAt: return "BlewUpAt";
    case OutcomeKind::StepCollapse: return "StepCollapse";
  }
  return "?";
}

namespace {

Regime regime_of(double xi2) {
  const double xi = std::sqrt(xi2);
  if (std::abs(xi - 0.5) < kResonantHalfWidth) return Regime::Resonant;
  return xi < 0.5 ? Regime::LowFreq : Regime::HighFreq;
}

// sinh(sqrt z)/sqrt z and cosh(sqrt z) by their power series, |z| <= 1.
void resonant_series(double z, double& s1, double& c0) {
  double term_c = 1.0, term_s = 1.0;
  c0 = 1.0;
  s1 = 1.0;
  for (int k = 1; k < 30; ++k) {
    term_c *= z / ((2.0 * k - 1.0) * (2.0 * k));
    term_s *= z / ((2.0 * k) * (2.0 * k + 1.0));
    c0 += term_c;
    s1 += term_s;
    if (std::abs(term_c) < 1e-18 && std::abs(term_s) < 1e-18) break;
  }
}

}  // namespace

PropagatorSymbols symbols(double xi_abs) {
  const double xi2 = xi_abs * xi_abs;
  const double q = 0.25 - xi2;
  PropagatorSymbols s;
  s.regime = regime_of(xi2);
  if (q >= 0.0) {
    const double d = std::sqrt(q);
    // lambda_+ = -(1/2 - d) without the cancellation
    s.lambda_plus = -xi2 / (0.5 + d);
    s.lambda_minus = -0.5 - d;
  } else {
    const double w = std::sqrt(-q);
    s.lambda_plus = cplx(-0.5, w);
    s.lambda_minus = cplx(-0.5, -w);
  }
  return s;
}

Multipliers multipliers_xi2(double xi2, double t) {
  if (t < 0.0 || !std::isfinite(t)) throw std::invalid_argument("multipliers need t >= 0");
  const double q = 0.25 - xi2;
  double k0, k1;
  const bool band = regime_of(xi2) == Regime::Resonant;
  if (band && std::abs(q * t * t) <= 1.0) {
    double s1, c0;
    resonant_series(q * t * t, s1, c0);
    const double e = std::exp(-0.5 * t);
    k1 = e * t * s1;
    k0 = e * (c0 + 0.5 * t * s1);
  } else if (q > 0.0) {
    const double d = std::sqrt(q);
    const double lp = -xi2 / (0.5 + d);
    const double e = std::exp(lp * t);
    k1 = e * (-std::expm1(-2.0 * d * t)) / (2.0 * d);
    k0 = e - lp * k1;
  } else {
    const double w = std::sqrt(-q);
    const double e = std::exp(-0.5 * t);
    const double sn = std::sin(w * t), cs = std::cos(w * t);
    k1 = e * sn / w;
    k0 = e * (cs + sn / (2.0 * w));
  }
  return {k0, k1, -xi2 * k1, k0 - k1};
}

Multipliers multipliers(double xi_abs, double t) {
  return multipliers_xi2(xi_abs * xi_abs, t);
}

LinearPropagator::LinearPropagator(const GridSpec& spec, double dt) : spec_(spec), dt_(dt) {
  if (dt < 0.0 || !std::isfinite(dt)) throw std::invalid_argument("propagation step must be >= 0");
  const auto& tab = spectral_table(spec);
  table_.resize(tab.xi2.size());
  for (std::size_t m = 0; m < table_.size(); ++m) table_[m] = multipliers_xi2(tab.xi2[m], dt);
}

void LinearPropagator::apply(std::vector<cplx>& u_hat, std::vector<cplx>& v_hat) const {
  kernels::apply_propagator(u_hat, v_hat, table_);
}

WaveState LinearPropagator::operator()(const WaveState& s) const {
  if (!(s.spec() == spec_)) throw std::invalid_argument("propagator grid mismatch");
  require_finite(s.u);
  require_finite(s.v);
  if (dt_ == 0.0) return s;
  auto uh = forward(s.u);
  auto vh = forward(s.v);
  apply(uh, vh);
  return WaveState(s.t + dt_, inverse(spec_, uh), inverse(spec_, vh));
}

WaveState propagate(const WaveState& state, double dt) {
  return LinearPropagator(state.spec(), dt)(state);
}

double xnorm_term(const NormRecord& r, int n) {
  const double a = 1.0 + r.t;
  return std::pow(a, n / 4.0) * r.l2 + std::pow(a, (n + 2) / 4.0) * r.h1dot +
         std::pow(a, n / 2.0) * r.linf;
}

NormRecord measure(const WaveState& s, const Nonlinearity* h) {
  NormRecord r;
  r.t = s.t;
  r.l1 = lp_norm(s.u, LpNorm::L1);
  r.l2 = lp_norm(s.u, LpNorm::L2);
  r.linf = lp_norm(s.u, LpNorm::Linf);
  r.h1dot = hdot1_norm(s.u);
  const double vl2 = lp_norm(s.v, LpNorm::L2);
  r.energy = 0.5 * vl2 * vl2 + 0.5 * r.h1dot * r.h1dot;
  if (h && !h->is_zero()) {
    std::vector<double> hu(s.u.size());
    kernels::nonlinear(hu, s.u.values(), *h);
    r.forcing = kernels::sum_abs(hu) * s.spec().cell_volume();
  }
  r.xnorm = xnorm_term(r, s.spec().dim);
  return r;
}

Trajectory linear_trajectory(const WaveState& data, const std::vector<double>& times,
                             bool keep_snapshots) {
  Trajectory tr;
  tr.dim = data.spec().dim;
  require_finite(data.u);
  require_finite(data.v);
  const auto uh0 = forward(data.u);
  const auto vh0 = forward(data.v);
  const auto& tab = spectral_table(data.spec());
  double prev = -1.0, running = 0.0;
  std::vector<kernels::PropagatorEntry> entries(uh0.size());
  for (double t : times) {
    if (!(t > prev)) throw std::invalid_argument("sample times must be strictly increasing");
    if (t < data.t) throw std::invalid_argument("sample time precedes the data time");
    prev = t;
    const double dt = t - data.t;
    for (std::size_t m = 0; m < entries.size(); ++m) entries[m] = multipliers_xi2(tab.xi2[m], dt);
    auto uh = uh0, vh = vh0;
    kernels::apply_propagator(uh, vh, entries);
    WaveState s(t, inverse(data.spec(), uh), inverse(data.spec(), vh));
    auto rec = measure(s);
    running = std::max(running, rec.xnorm);
    rec.xnorm = running;
    tr.records.push_back(rec);
    if (keep_snapshots) tr.snapshots.push_back({t, s.u});
  }
  return tr;
}

std::vector<double> log_times(double t0, double t1, int count) {
  if (!(t0 > 0.0) || !(t1 > t0) || count < 2) throw std::invalid_argument("bad log_times range");
  std::vector<double> out(count);
  const double a = std::log(t0), b = std::log(t1);
  for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
  out.front() = t0;
  out.back() = t1;
  return out;
}

std::string to_string(NormName n) {
  switch (n) {
    case NormName::L1: return "L1";
    case NormName::L2: return "L2";
    case NormName::Linf: return "Linf";
    case NormName::H1dot: return "H1dot";
    case NormName::Energy: return "energy";
  }
  return "?";
}

NormName parse_norm_name(const std::string& s) {
  for (auto n : {NormName::L1, NormName::L2, NormName::Linf, NormName::H1dot, NormName::Energy})
    if (to_string(n) == s) return n;
  throw std::invalid_argument("unknown norm '" + s + "'");
}

double norm_value(const NormRecord& r, NormName n) {
  switch (n) {
    case NormName::L1: return r.l1;
    case NormName::L2: return r.l2;
    case NormName::Linf: return r.linf;
    case NormName::H1dot: return r.h1dot;
    case NormName::Energy: return r.energy;
  }
  return 0.0;
}

DecayFit decay_fit(const std::vector<NormRecord>& records, NormName norm, double t_min,
                   double t_max) {
  if (!(t_max > t_min)) throw std::invalid_argument("decay window is empty");
  std::vector<double> x, y;
  for (const auto& r : records) {
    if (r.t < t_min || r.t > t_max) continue;
    const double v = norm_value(r, norm);
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("decay fit needs positive finite norms");
    x.push_back(std::log1p(r.t));
    y.push_back(std::log(v));
  }
  if (x.size() < 20) throw std::invalid_argument("decay window holds fewer than 20 samples");
  if (x.back() - x.front() < std::log(10.0) - 1e-12)
    throw std::invalid_argument("decay window spans less than a decade of (1+t)");
  const double k = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  DecayFit f;
  f.norm = norm;
  f.t_min = t_min;
  f.t_max = t_max;
  f.exponent = sxy / sxx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (my + f.exponent * (x[i] - mx));
    ss += e * e;
  }
  f.residual = std::sqrt(ss / k);
  f.samples = static_cast<int>(x.size());
  return f;
}

}  // namespace dwlab
