#include "dwlab/semilinear.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "dwlab/kernels.hpp"

namespace dwlab {

void EvolveConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("t_max must be positive");
  if (!(blowup_threshold > 1.0)) throw std::invalid_argument("blow-up threshold must exceed 1");
  if (!(dt_min > 0.0) || dt_min >= dt) throw std::invalid_argument("dt_min must lie in (0, dt)");
  if (sample_stride < 1) throw std::invalid_argument("sample stride must be >= 1");
  if (snapshot_every < 0) throw std::invalid_argument("snapshot_every must be >= 0");
  if (!(data.spec() == grid)) throw std::invalid_argument("data grid differs from the run grid");
  if (h.dimension() != grid.dim) throw std::invalid_argument("nonlinearity dimension differs from grid");
  require_finite(data.u);
  require_finite(data.v);
}

Stepper::Stepper(const GridSpec& grid, Nonlinearity h) : grid_(grid), h_(std::move(h)) {}

WaveState Stepper::step(const WaveState& s, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step needs dt > 0");
  auto& prop = cache_[dt];
  if (!prop) prop = std::make_unique<LinearPropagator>(grid_, dt);
  GridField v = s.v;
  if (!h_.is_zero()) kernels::kick(v.values(), s.u.values(), 0.5 * dt, h_);
  if (kernels::first_nonfinite(v.values())) throw BlowupSignal(s.t);
  auto uh = forward(s.u);
  auto vh = forward(v);
  prop->apply(uh, vh);
  WaveState out(s.t + dt, inverse(grid_, uh), inverse(grid_, vh));
  if (!h_.is_zero()) kernels::kick(out.v.values(), out.u.values(), 0.5 * dt, h_);
  if (kernels::first_nonfinite(out.u.values()) || kernels::first_nonfinite(out.v.values()))
    throw BlowupSignal(out.t);
  return out;
}

WaveState step(const WaveState& s, double dt, const Nonlinearity& h) {
  return Stepper(s.spec(), h).step(s, dt);
}

Trajectory evolve(const EvolveConfig& cfg) {
  cfg.validate();
  Trajectory tr;
  tr.dim = cfg.grid.dim;
  Stepper stepper(cfg.grid, cfg.h);
  WaveState state = cfg.data;
  state.t = 0.0;
  const double interval = cfg.sample_interval();
  double running = 0.0;
  int sample_index = 0;

  auto record = [&](const WaveState& s) {
    auto r = measure(s, &cfg.h);
    running = std::max(running, r.xnorm);
    r.xnorm = running;
    if (!tr.records.empty()) {
      const auto& p = tr.records.back();
      tr.forcing_integral += 0.5 * (s.t - p.t) * (r.forcing + p.forcing);
    }
    tr.records.push_back(r);
    if (cfg.snapshot_every > 0 && sample_index % cfg.snapshot_every == 0)
      tr.snapshots.push_back({s.t, s.u});
    ++sample_index;
  };
  record(state);

  double dt = cfg.dt;
  long long next_k = 1;
  const double eps_t = 1e-9 * cfg.dt;
  while (state.t < cfg.t_max - eps_t) {
    const double target = std::min(next_k * interval, cfg.t_max);
    const double h = std::min(dt, target - state.t);
    WaveState next;
    try {
      next = stepper.step(state, h);
    } catch (const BlowupSignal&) {
      tr.outcome = {OutcomeKind::BlewUpAt, state.t, "non-finite values after the step from t = " +
                                                        std::to_string(state.t)};
      return tr;
    }
    const double old_inf = kernels::max_abs(state.u.values());
    const double new_inf = kernels::max_abs(next.u.values());
    if (old_inf >= cfg.growth_floor && new_inf > 2.0 * old_inf) {
      dt *= 0.5;
      ++tr.dt_halvings;
      if (dt < cfg.dt_min) {
        tr.outcome = {OutcomeKind::StepCollapse, state.t, "dt fell below dt_min"};
        record(state);
        return tr;
      }
      continue;
    }
    state = std::move(next);
    ++tr.steps;
    const bool on_sample = std::abs(state.t - target) <= eps_t;
    if (on_sample) state.t = target;
    if (new_inf > cfg.blowup_threshold) {
      record(state);
      tr.outcome = {OutcomeKind::BlewUpAt, state.t, "||u||_inf exceeded the blow-up threshold"};
      return tr;
    }
    if (on_sample) {
      record(state);
      ++next_k;
    }
  }
  tr.outcome = {OutcomeKind::CompletedHorizon, std::numeric_limits<double>::infinity(), ""};
  return tr;
}

double xnorm(const Trajectory& tr) { return tr.xnorm(); }

// ---------------------------------------------------------------------------
// Picard iteration

namespace {

struct SpectralSeries {
  std::vector<std::vector<cplx>> at;  // per time level
};

// sup_j of the X weight sum for a series of spectra at t_j = j dt.
double series_xnorm(const GridSpec& spec, const SpectralSeries& s, double dt) {
  const auto& tab = spectral_table(spec);
  const double scale = spec.cell_volume() / static_cast<double>(spec.size());
  std::vector<double> w1(tab.xi2.size());
  for (std::size_t m = 0; m < w1.size(); ++m) w1[m] = tab.multiplicity[m] * tab.xi2_diff[m];
  const int n = spec.dim;
  double best = 0.0;
  for (std::size_t j = 0; j < s.at.size(); ++j) {
    NormRecord r;
    r.t = j * dt;
    r.l2 = std::sqrt(kernels::weighted_energy(s.at[j], tab.multiplicity) * scale);
    r.h1dot = std::sqrt(kernels::weighted_energy(s.at[j], w1) * scale);
    r.linf = kernels::max_abs(inverse(spec, s.at[j]).values());
    best = std::max(best, xnorm_term(r, n));
  }
  return best;
}

}  // namespace

PicardReport picard_verify(const EvolveConfig& cfg, double window_T, int iterations) {
  cfg.validate();
  if (iterations < 3) throw std::invalid_argument("picard_verify needs at least 3 iterations");
  if (!(window_T > 0.0)) throw std::invalid_argument("window must be positive");
  const int M = static_cast<int>(std::lround(window_T / cfg.dt));
  if (M < 1 || std::abs(M * cfg.dt - window_T) > 1e-9 * window_T)
    throw std::invalid_argument("window must be a multiple of dt");
  const auto& spec = cfg.grid;
  const auto& tab = spectral_table(spec);
  const std::size_t modes = tab.xi2.size();
  const double dt = cfg.dt;

  // K1(m dt) per mode, and the linear solution at every level.
  std::vector<std::vector<double>> k1(M + 1, std::vector<double>(modes));
  SpectralSeries lin;
  lin.at.resize(M + 1);
  std::vector<GridField> lin_phys(M + 1);
  const auto uh0 = forward(cfg.data.u), vh0 = forward(cfg.data.v);
  for (int m = 0; m <= M; ++m) {
    std::vector<kernels::PropagatorEntry> e(modes);
    for (std::size_t i = 0; i < modes; ++i) {
      e[i] = multipliers_xi2(tab.xi2[i], m * dt);
      k1[m][i] = e[i].k1;
    }
    auto uh = uh0, vh = vh0;
    kernels::apply_propagator(uh, vh, e);
    lin_phys[m] = inverse(spec, uh);
    lin.at[m] = std::move(uh);
  }

  PicardReport rep;
  rep.lin_xnorm = series_xnorm(spec, lin, dt);
  SpectralSeries G;  // Duhamel part of the current iterate, kept apart from u_lin
  G.at.assign(M + 1, std::vector<cplx>(modes, cplx(0.0)));
  std::vector<double> hu(spec.size());
  double g_scale = 0.0;
  for (int k = 0; k < iterations; ++k) {
    std::vector<std::vector<cplx>> hh(M + 1);
    for (int m = 0; m <= M; ++m) {
      GridField u = lin_phys[m];
      if (k > 0) u += inverse(spec, G.at[m]);
      kernels::nonlinear(hu, u.values(), cfg.h);
      hh[m] = forward(GridField(spec, hu));
    }
    SpectralSeries next;
    next.at.assign(M + 1, std::vector<cplx>(modes, cplx(0.0)));
    for (int j = 1; j <= M; ++j) {
      auto& acc = next.at[j];
      for (int m = 0; m < j; ++m) {
        const double w = m == 0 ? 0.5 * dt : dt;  // the m = j node carries K1(0) = 0
        kernels::axpy_multiplier(acc, hh[m], k1[j - m], w);
      }
    }
    SpectralSeries diff;
    diff.at.resize(M + 1);
    for (int j = 0; j <= M; ++j) {
      diff.at[j] = next.at[j];
      for (std::size_t i = 0; i < modes; ++i) diff.at[j][i] -= G.at[j][i];
    }
    rep.corrections.push_back(series_xnorm(spec, diff, dt));
    G = std::move(next);
    g_scale = std::max(g_scale, series_xnorm(spec, G, dt));
  }
  rep.iterations = iterations;
  // Differences below a few ulps of the iterate are roundoff, not contraction.
  rep.noise_floor = 64.0 * std::numeric_limits<double>::epsilon() * (g_scale + rep.lin_xnorm * 1e-6);
  rep.contraction_factor = 0.0;
  for (std::size_t k = 1; k < rep.corrections.size(); ++k) {
    if (rep.corrections[k - 1] <= rep.noise_floor) break;
    rep.contraction_factor = std::max(rep.contraction_factor, rep.corrections[k] / rep.corrections[k - 1]);
  }

  // Split-step solution on the same step.
  Stepper st(spec, cfg.h);
  WaveState s = cfg.data;
  s.t = 0.0;
  for (int m = 0; m < M; ++m) s = st.step(s, dt);
  GridField picard = lin_phys[M] + inverse(spec, G.at[M]);
  rep.mismatch_linf = kernels::max_abs((picard - s.u).values());
  return rep;
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<SweepRow> run_sweep(const EvolveConfig& base, const DataSpec& shape,
                                const std::vector<SweepJob>& jobs, int workers,
                                const std::function<void(const SweepRow&)>& on_done) {
  if (jobs.empty()) throw std::invalid_argument("sweep has no jobs");
  workers = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  std::vector<SweepRow> rows(jobs.size());
  std::mutex out_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      SweepRow row;
      row.index = i;
      row.nonlinearity = jobs[i].h.spec();
      row.epsilon = jobs[i].epsilon;
      try {
        EvolveConfig cfg = base;
        cfg.h = jobs[i].h;
        DataSpec d = shape;
        d.amplitude = jobs[i].epsilon;
        require_no_wrap(cfg.grid, d, cfg.t_max);
        cfg.data = make_data(cfg.grid, d);
        cfg.snapshot_every = 0;
        auto tr = evolve(cfg);
        row.ok = true;
        row.outcome = tr.outcome;
        row.forcing_integral = tr.forcing_integral;
        row.final_linf = tr.records.back().linf;
        row.xnorm = tr.xnorm();
        row.trajectory = std::move(tr);
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
      std::lock_guard lock(out_mutex);
      if (on_done) on_done(row);
      rows[i] = std::move(row);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

std::vector<SweepRow> lifespan_sweep(const EvolveConfig& base, const DataSpec& shape,
                                     const std::vector<double>& epsilons, int workers) {
  if (epsilons.empty()) throw std::invalid_argument("empty epsilon list");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw std::invalid_argument("epsilons must be positive");
    if (i > 0 && !(epsilons[i] > epsilons[i - 1]))
      throw std::invalid_argument("epsilons must be increasing");
  }
  std::vector<SweepJob> jobs;
  for (double e : epsilons) jobs.push_back({base.h, e});
  return run_sweep(base, shape, jobs, workers);
}

}  // namespace dwlab
