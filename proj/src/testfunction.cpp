#include "dwlab/testfunction.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dwlab/quadrature.hpp"

namespace dwlab::tf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct EtaParts {
  double e = 0.0, d1 = 0.0, d2 = 0.0;
};

// eta = 1/(1 + e^g), g = 1/(1-s) - 1/(s-1/2).
EtaParts eta_parts(double s) {
  EtaParts r;
  if (s <= 0.5) {
    r.e = 1.0;
    return r;
  }
  if (s >= 1.0) return r;
  const double a = 1.0 - s, b = s - 0.5;
  const double g = 1.0 / a - 1.0 / b;
  const double ex = std::exp(-std::abs(g));
  r.e = g > 0.0 ? ex / (1.0 + ex) : 1.0 / (1.0 + ex);
  if (std::abs(g) > 700.0) return r;  // eta(1-eta) below e^-700: derivatives vanish
  const double ec = ex / ((1.0 + ex) * (1.0 + ex));
  const double g1 = 1.0 / (a * a) + 1.0 / (b * b);
  const double g2 = 2.0 / (a * a * a) - 2.0 / (b * b * b);
  r.d1 = -ec * g1;
  r.d2 = -(r.d1 * (1.0 - 2.0 * r.e) * g1 + ec * g2);
  return r;
}

// Cubic-Hermite table of the inner weight on [1/2, 1].
struct WeightTable {
  int n = 1;
  int cells = 8192;
  std::vector<double> w;  // values at s_i = 1/2 + i h
  double h = 0.0;
  explicit WeightTable(int dim) : n(dim) {
    h = 0.5 / cells;
    w.assign(cells + 1, 0.0);
    auto f = [&](double t) { return std::pow(eta(t), n + 2) / t; };
    for (int i = cells - 1; i >= 0; --i) {
      const double a = 0.5 + i * h, b = 0.5 + (i + 1) * h;
      w[i] = w[i + 1] + quad::integrate(f, a, b, 1e-16, 1e-14).value;
    }
  }
  double deriv(double s) const { return -std::pow(eta(s), n + 2) / s; }
  double operator()(double s) const {
    if (s >= 1.0) return 0.0;
    if (s <= 0.5) return w[0];
    const double x = (s - 0.5) / h;
    int i = std::min(static_cast<int>(x), cells - 1);
    const double t = x - i;
    const double s0 = 0.5 + i * h, s1 = s0 + h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return h00 * w[i] + h10 * h * deriv(s0) + h01 * w[i + 1] + h11 * h * deriv(s1);
  }
};

const WeightTable& weight_table(int n) {
  static const WeightTable t1(1), t2(2);
  return n == 1 ? t1 : t2;
}

void check_dim(int n) {
  if (n != 1 && n != 2) throw std::invalid_argument("dimension must be 1 or 2");
}

}  // namespace

double eta(double s) { return eta_parts(s).e; }
double eta_d1(double s) { return eta_parts(s).d1; }
double eta_d2(double s) { return eta_parts(s).d2; }
double eta_star(double s) { return s <= 0.5 ? 0.0 : eta(s); }

CutoffStats cutoff_stats(int samples) {
  CutoffStats st;
  for (int i = 1; i < samples; ++i) {
    const auto p = eta_parts(0.5 + 0.5 * i / samples);
    st.max_abs_d1 = std::max(st.max_abs_d1, std::abs(p.d1));
    st.max_abs_d2 = std::max(st.max_abs_d2, std::abs(p.d2));
  }
  return st;
}

double inner_weight(double s, int n) {
  check_dim(n);
  return weight_table(n)(s);
}

PsiWeights psi_weights(double t, std::span<const double> x, double R, int n) {
  check_dim(n);
  if (!(R > 0.0)) throw std::invalid_argument("R must be positive");
  if (static_cast<int>(x.size()) != n) throw std::invalid_argument("x must have n entries");
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  const double sigma = (r2 + t) / R;
  const auto p = eta_parts(sigma);
  PsiWeights w;
  const double en = std::pow(p.e, n), en1 = en * p.e;
  w.psi = en1 * p.e;
  w.psi_star = sigma <= 0.5 ? 0.0 : w.psi;
  const double m = n + 2.0;
  w.dt = m / R * en1 * p.d1;
  w.dtt = m * (n + 1) / (R * R) * en * p.d1 * p.d1 + m / (R * R) * en1 * p.d2;
  for (double xj : x) {
    w.lap += 4.0 * m * (n + 1) * xj * xj / (R * R) * en * p.d1 * p.d1 +
             4.0 * m * xj * xj / (R * R) * en1 * p.d2 + 2.0 * m / R * en1 * p.d1;
  }
  return w;
}

double weight_constant(int n, double R0, double margin, int samples) {
  check_dim(n);
  if (!(R0 > 0.0)) throw std::invalid_argument("R0 must be positive");
  const double m = n + 2.0;
  double best = 0.0;
  for (int i = 1; i < samples; ++i) {
    const double s = 0.5 + 0.5 * i / samples;
    const auto p = eta_parts(s);
    // R E / eta^n = (1/R - 4 theta s) A - B, theta = |x|^2 / (s R) in [0, 1]
    const double A = m * ((n + 1) * p.d1 * p.d1 + p.e * p.d2);
    const double B = m * (2 * n + 1) * p.e * p.d1;
    for (double rho : {0.0, 1.0 / R0})
      for (double theta : {0.0, 1.0}) best = std::max(best, std::abs((rho - 4 * theta * s) * A - B));
  }
  return best * (1.0 + margin);
}

WeightBoundReport check_weight_bound(int n, double R, double C, int nt, int nx) {
  check_dim(n);
  if (nt < 2 || nx < 2) throw std::invalid_argument("grid needs at least 2 points per axis");
  WeightBoundReport rep;
  rep.C = C;
  const double rr = std::sqrt(R);
  std::array<double, 2> x{};
  const int ny = n == 2 ? nx : 1;
  for (int it = 0; it < nt; ++it) {
    const double t = R * it / (nt - 1);
    for (int i = 0; i < nx; ++i) {
      x[0] = -rr + 2 * rr * i / (nx - 1);
      for (int j = 0; j < ny; ++j) {
        if (n == 2) x[1] = -rr + 2 * rr * j / (nx - 1);
        const auto w = psi_weights(t, std::span<const double>(x.data(), n), R, n);
        const double E = std::abs(w.dtt - w.lap - w.dt);
        const double sigma = (x[0] * x[0] + (n == 2 ? x[1] * x[1] : 0.0) + t) / R;
        const double bound = C / R * std::pow(eta_star(sigma), n);
        ++rep.points;
        if (E == 0.0) continue;
        if (bound <= 0.0 || E > bound * (1.0 + 1e-12)) {
          ++rep.violations;
          rep.max_ratio = kInf;
          continue;
        }
        rep.max_ratio = std::max(rep.max_ratio, E / bound);
      }
    }
  }
  return rep;
}

SpaceTimeSamples collect_samples(const std::vector<Snapshot>& snaps, const Nonlinearity& h,
                                 double R_max) {
  if (snaps.size() < 2) throw std::invalid_argument("need at least two snapshots");
  SpaceTimeSamples out;
  const auto& spec = snaps.front().u.spec();
  out.dim = spec.dim;
  out.t_end = snaps.back().t;
  out.x_reach = spec.half_length;
  out.R_max = R_max;
  const double cell = spec.cell_volume();
  const int N = spec.points;
  const std::size_t J = snaps.size();
  for (std::size_t j = 0; j < J; ++j) {
    if (j > 0 && !(snaps[j].t > snaps[j - 1].t))
      throw std::invalid_argument("snapshot times must increase");
    if (!(snaps[j].u.spec() == spec)) throw std::invalid_argument("snapshots on different grids");
    const double tj = snaps[j].t;
    const double wl = j > 0 ? 0.5 * (tj - snaps[j - 1].t) : 0.0;
    const double wr = j + 1 < J ? 0.5 * (snaps[j + 1].t - tj) : 0.0;
    const double wt = (wl + wr) * cell;
    if (tj >= R_max) continue;
    const auto& u = snaps[j].u;
    for (std::size_t k = 0; k < u.size(); ++k) {
      const int i1 = spec.dim == 1 ? static_cast<int>(k) : static_cast<int>(k / N);
      const double x1 = spec.coord(i1);
      double r2 = x1 * x1;
      if (spec.dim == 2) {
        const double x2 = spec.coord(static_cast<int>(k % N));
        r2 += x2 * x2;
      }
      if (r2 + tj >= R_max) continue;
      const double hv = h.eval(u[k]);
      if (hv == 0.0) continue;
      out.t.push_back(tj);
      out.r2.push_back(r2);
      out.a.push_back(hv * wt);
    }
  }
  return out;
}

namespace {

void check_cover(const SpaceTimeSamples& s, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("R must be positive");
  if (R > s.t_end * (1 + 1e-12)) throw std::invalid_argument("samples do not span [0, R] in time");
  if (std::sqrt(R) > s.x_reach) throw std::invalid_argument("spatial grid does not cover B_sqrt(R)");
  if (R > s.R_max * (1 + 1e-12)) throw std::invalid_argument("R exceeds the sampled region");
}

}  // namespace

double functional_IR(const SpaceTimeSamples& s, double R) {
  check_cover(s, R);
  double acc = 0.0;
  for (std::size_t p = 0; p < s.a.size(); ++p)
    acc += s.a[p] * std::pow(eta((s.r2[p] + s.t[p]) / R), s.dim + 2);
  return acc;
}

Functionals functional_Y(const SpaceTimeSamples& s, const std::vector<double>& R_grid) {
  for (std::size_t i = 0; i < R_grid.size(); ++i) {
    check_cover(s, R_grid[i]);
    if (i > 0 && !(R_grid[i] > R_grid[i - 1])) throw std::invalid_argument("R grid must increase");
  }
  Functionals f;
  const std::size_t K = R_grid.size();
  f.R = R_grid;
  f.I.assign(K, 0.0);
  f.y.assign(K, 0.0);
  f.Y.assign(K, 0.0);
  const int n = s.dim;
  const auto& W = weight_table(n);
  const auto P = static_cast<std::ptrdiff_t>(s.a.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(K); ++k) {
    const double R = R_grid[k];
    double I = 0, y = 0, Y = 0;
    for (std::ptrdiff_t p = 0; p < P; ++p) {
      const double sigma = (s.r2[p] + s.t[p]) / R;
      if (sigma >= 1.0) continue;
      const double e = std::pow(eta(sigma), n + 2);
      I += s.a[p] * e;
      if (sigma > 0.5) y += s.a[p] * e;
      if (sigma > 0.0) Y += s.a[p] * W(sigma);
    }
    f.I[k] = I;
    f.y[k] = y;
    f.Y[k] = Y;
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (f.I[k] > 0.0) f.max_ratio_to_bound = std::max(f.max_ratio_to_bound, f.Y[k] / (std::log(2.0) * f.I[k]));
    if (f.Y[k] > std::log(2.0) * f.I[k] * (1 + 1e-12)) f.bound_holds = false;
  }
  return f;
}

// ---------------------------------------------------------------------------
// Certificate

namespace {

bool is_log_chain(const Modulus& mu) {
  return mu.kind() == ModulusKind::InvLog || mu.kind() == ModulusKind::IterLog;
}

// G(w0, w1) = int_{w0}^{w1} mu(e^-w) dw.
double dini_segment(const Modulus& mu, double w0, double w1) {
  if (w1 <= w0) return 0.0;
  auto f = [&](double w) { return mu.eval(std::exp(-w)); };
  double acc = 0.0;
  // Panels of unit width keep the adaptive rule well conditioned.
  for (double a = w0; a < w1;) {
    const double b = std::min(w1, a + std::max(1.0, 0.25 * std::abs(a)));
    acc += quad::integrate(f, a, b, 1e-14, 1e-13).value;
    a = b;
  }
  return acc;
}

// Closed-form antiderivative in the variable z = z_{k+1} on the formula branch.
double chain_F(double p, double z) {
  if (p == 1.0) return z;
  return std::exp((1.0 - p) * z) / (1.0 - p);
}

// z_{k+1} as a function of w = log(1/s).
double chain_z(double w, int k) {
  double z = w;
  for (int j = 0; j <= k; ++j) z = std::log(z);
  return z;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int chain_depth(const Modulus& mu) { return mu.kind() == ModulusKind::InvLog ? 0 : mu.depth(); }

}  // namespace

Certificate blowup_certificate(const Functionals& f, const Modulus& mu, int n, double R0,
                               double C_w, double data_mass) {
  check_dim(n);
  if (!(data_mass > 0.0))
    throw std::invalid_argument("certificate needs data with positive integral");
  if (!(C_w > 0.0)) throw std::invalid_argument("weight constant must be positive");
  auto it = std::find_if(f.R.begin(), f.R.end(),
                         [&](double r) { return std::abs(r - R0) <= 1e-12 * R0; });
  if (it == f.R.end()) throw std::invalid_argument("R0 must be one of the grid radii");
  Certificate c;
  c.n = n;
  c.R0 = R0;
  c.C_w = C_w;
  c.Y_R0 = f.Y[it - f.R.begin()];
  if (!(c.Y_R0 > 0.0)) throw std::invalid_argument("Y(R0) = 0: no nonlinear mass inside Q_R0");
  c.kappa = n == 1 ? 2.0 - (2.0 / 3.0) / std::sqrt(2.0) : 7.0 * M_PI / 8.0;
  c.A = std::log(2.0) * C_w * c.kappa;
  c.c2 = c.Y_R0 / c.A;
  c.c1 = (2.0 / n) * c.kappa / std::pow(c.A, (n + 2.0) / n);
  c.rhs = std::pow(c.Y_R0, -2.0 / n);

  // lhs(R) = c1 (2/n) G(w(R0), w(R)), w(s) = (n/2) log s - log c2
  const double scale = c.c1 * 2.0 / n;
  auto w_of = [&](double R) { return 0.5 * n * std::log(R) - std::log(c.c2); };
  const double w0 = w_of(R0);
  double acc = 0.0, w_prev = w0;
  for (double R : f.R) {
    if (R < R0 * (1 - 1e-12)) continue;
    const double w = w_of(R);
    acc += dini_segment(mu, w_prev, w);
    w_prev = w;
    c.R.push_back(R);
    c.lhs.push_back(scale * acc);
  }

  const double target = c.rhs / scale;  // G value at which lhs reaches rhs
  double w_hit = kInf;
  double logw_hit = kInf;
  if (is_log_chain(mu)) {
    const int k = chain_depth(mu);
    const double p = mu.p();
    const double wf = std::log(1.0 / mu.continuation_point());
    const double wb = std::max(w0, wf);
    const double Gb = dini_segment(mu, w0, wb);
    const double Fb = chain_F(p, chain_z(wb, k));
    c.lhs_limit = p <= 1.0 ? kInf : scale * (Gb - Fb);
    if (target <= Gb) {
      double lo = w0, hi = wb;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (dini_segment(mu, w0, mid) < target ? lo : hi) = mid;
      }
      w_hit = 0.5 * (lo + hi);
      logw_hit = std::log(w_hit);
    } else {
      const double Ft = Fb + (target - Gb);
      double z = kInf;
      if (p == 1.0) z = Ft;
      else if (p < 1.0) z = std::log((1.0 - p) * Ft) / (1.0 - p);
      else if (Ft < 0.0) z = -std::log(-(p - 1.0) * Ft) / (p - 1.0);
      if (std::isfinite(z)) {
        // Undo the k+1 logarithms; z_1 = log w is kept even when w overflows.
        double zj = z;
        for (int j = k; j >= 1 && std::isfinite(zj); --j) zj = std::exp(zj);
        logw_hit = zj;
        w_hit = std::exp(zj);
      }
    }
  } else {
    // Integrand decays exponentially in w: sum unit panels until negligible.
    double G = 0.0, w = w0;
    bool hit = false;
    for (int i = 0; i < 100000; ++i) {
      const double piece = dini_segment(mu, w, w + 1.0);
      if (!hit && G + piece >= target) {
        double lo = w, hi = w + 1.0;
        for (int b = 0; b < 200; ++b) {
          const double mid = 0.5 * (lo + hi);
          (G + dini_segment(mu, w, mid) < target ? lo : hi) = mid;
        }
        w_hit = 0.5 * (lo + hi);
        logw_hit = std::log(w_hit);
        hit = true;
      }
      G += piece;
      w += 1.0;
      if (piece <= 1e-16 * G || (G == 0.0 && piece == 0.0)) break;
    }
    c.lhs_limit = scale * G;
  }

  if (std::isfinite(logw_hit)) {
    c.witness = true;
    // log R = (2/n)(w + log c2)
    if (std::isfinite(w_hit)) {
      c.log_R_witness = (2.0 / n) * (w_hit + std::log(c.c2));
      c.loglog_R_witness = c.log_R_witness > 0.0 ? std::log(c.log_R_witness) : -kInf;
    } else {
      c.log_R_witness = kInf;
      c.loglog_R_witness = std::log(2.0 / n) + logw_hit;
    }
    c.witness_in_grid = !c.R.empty() && c.log_R_witness <= std::log(c.R.back());
    c.verdict = "contradiction witness at log R = " + fmt_g(c.log_R_witness) +
                " (log log R = " + fmt_g(c.loglog_R_witness) + ")";
  } else {
    c.verdict = "bounded: left side tends to " + fmt_g(c.lhs_limit) + " below the right side " +
                fmt_g(c.rhs) + "; no witness";
  }
  return c;
}

JensenResult jensen_check(const std::function<double(double)>& phi, std::span<const double> u,
                          std::span<const double> alpha) {
  if (u.size() != alpha.size()) throw std::invalid_argument("u and alpha differ in size");
  double sa = 0, sua = 0, spa = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (alpha[i] < 0.0 || u[i] < 0.0) throw std::invalid_argument("u and alpha must be non-negative");
    sa += alpha[i];
    sua += u[i] * alpha[i];
    spa += phi(u[i]) * alpha[i];
  }
  if (!(sa > 0.0)) throw std::invalid_argument("weight integrates to zero");
  JensenResult r;
  r.lhs = phi(sua / sa);
  r.rhs = spa / sa;
  r.holds = r.lhs <= r.rhs + 1e-12 * (1.0 + std::abs(r.rhs));
  return r;
}

}  // namespace dwlab::tf
