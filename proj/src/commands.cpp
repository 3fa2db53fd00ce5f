#include "dwlab/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "dwlab/data.hpp"
#include "dwlab/linear.hpp"
#include "dwlab/modulus.hpp"
#include "dwlab/report.hpp"
#include "dwlab/semilinear.hpp"
#include "dwlab/testfunction.hpp"

namespace dwlab::app {

namespace fs = std::filesystem;

namespace {

using Keys = std::set<std::string>;

const Keys kGridKeys = {"n", "L", "N"};
const Keys kDataKeys = {"data.shape", "data.slot", "data.amplitude", "data.center", "data.width"};
const Keys kEvolveKeys = {"modulus",     "nonlinearity", "dt",           "t_max",
                          "sample_stride", "blowup_threshold", "dt_min", "growth_floor",
                          "snapshot_every", "fit.t_min",  "fit.t_max"};

Keys merge(std::initializer_list<Keys> parts, Keys extra = {}) {
  Keys out = std::move(extra);
  for (const auto& p : parts) out.insert(p.begin(), p.end());
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int dimension(const Config& cfg) {
  const int n = cfg.get_int("n", 1);
  if (n != 1 && n != 2) throw ConfigError("n must be 1 or 2");
  return n;
}

GridSpec grid_from(const Config& cfg, double L_default, int N1_default, int N2_default) {
  const int n = dimension(cfg);
  return GridSpec(n, cfg.get_double("L", L_default),
                  cfg.get_int("N", n == 1 ? N1_default : N2_default));
}

double auto_half_length(int n, const DataSpec& d, double t_max) {
  return std::ceil(support_radius(GridSpec(n, 1.0, 16), d) + t_max + 2.0);
}

DataSpec data_from(const Config& cfg, double amplitude_default) {
  DataSpec d;
  d.shape = parse_data_shape(cfg.get_string("data.shape", "gaussian"));
  d.slot = parse_data_slot(cfg.get_string("data.slot", "psi"));
  d.amplitude = cfg.get_double("data.amplitude", amplitude_default);
  d.center = cfg.get_double("data.center", 0.0);
  d.width = cfg.get_double("data.width", 1.0);
  return d;
}

Nonlinearity nonlinearity_from(const Config& cfg, int n) {
  if (cfg.has("nonlinearity")) return parse_nonlinearity(cfg.get_string("nonlinearity", ""), n);
  return parse_nonlinearity(cfg.get_string("modulus", "invlog:p=2"), n);
}

EvolveConfig evolve_from(const Config& cfg, const GridSpec& grid, Nonlinearity h) {
  EvolveConfig e;
  e.grid = grid;
  e.h = std::move(h);
  e.dt = cfg.get_double("dt", 0.05);
  e.t_max = cfg.get_double("t_max", 500.0);
  e.sample_stride = cfg.get_int("sample_stride", 10);
  e.blowup_threshold = cfg.get_double("blowup_threshold", 1e6);
  e.dt_min = cfg.get_double("dt_min", 1e-10);
  e.growth_floor = cfg.get_double("growth_floor", 1.0);
  e.snapshot_every = cfg.get_int("snapshot_every", 0);
  return e;
}

void echo_config(Manifest& m, const Config& cfg, const CommandOptions& opt) {
  for (const auto& [k, v] : cfg.entries()) m.add("config." + k, v);
  m.add("config_hash", cfg.hash_hex());
  m.add("seed", std::to_string(opt.seed));
}

std::string fmt(double v, int prec = 6) {
  std::ostringstream o;
  o << std::setprecision(prec) << v;
  return o.str();
}

// Optional L^inf fit for a semilinear run that reached its horizon.
std::optional<DecayFit> try_fit(const Trajectory& tr, double t0, double t1) {
  if (tr.outcome.kind != OutcomeKind::CompletedHorizon) return std::nullopt;
  try {
    return decay_fit(tr.records, NormName::Linf, t0, t1);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

void write_snapshots(const std::string& dir, const Trajectory& tr) {
  if (tr.snapshots.empty()) return;
  ensure_dir(dir + "/snapshots");
  std::ofstream idx(dir + "/snapshots.csv");
  idx << "t,file\n";
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "u_%06zu.bin", i);
    write_field(dir + "/snapshots/" + name, tr.snapshots[i].u, tr.snapshots[i].t);
    idx << format_real(tr.snapshots[i].t) << ",snapshots/" << name << "\n";
  }
}

std::vector<Snapshot> read_snapshots(const std::string& dir) {
  std::ifstream idx(dir + "/snapshots.csv");
  if (!idx) throw ConfigError("trajectory '" + dir + "' has no snapshots.csv");
  std::string line;
  std::getline(idx, line);
  std::vector<Snapshot> out;
  while (std::getline(idx, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("malformed snapshots.csv line '" + line + "'");
    double t = 0.0;
    auto u = read_field(dir + "/" + line.substr(comma + 1), &t);
    out.push_back({t, std::move(u)});
  }
  if (out.empty()) throw ConfigError("trajectory '" + dir + "' has no snapshots");
  return out;
}

void describe_outcome(Manifest& m, const Trajectory& tr) {
  m.add("outcome", to_string(tr.outcome.kind));
  m.add("T_est", tr.outcome.t_est);
  if (!tr.outcome.detail.empty()) m.add("outcome_detail", tr.outcome.detail);
  m.add("steps", tr.steps);
  m.add("dt_halvings", tr.dt_halvings);
  const auto& last = tr.records.back();
  m.add("final.t", last.t);
  m.add("final.L1", last.l1);
  m.add("final.L2", last.l2);
  m.add("final.Linf", last.linf);
  m.add("final.H1dot", last.h1dot);
  m.add("xnorm", tr.xnorm());
  m.add("forcing_integral", tr.forcing_integral);
}

}  // namespace

std::string resolve_out_dir(const std::string& command, const Config& cfg,
                            const CommandOptions& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  const char* env = std::getenv("DWLAB_OUT");
  const std::string root = env && *env ? env : "dwlab_out";
  return root + "/" + command + "-" + cfg.hash_hex().substr(0, 8);
}

// ---------------------------------------------------------------------------

int cmd_classify(const Config& cfg, const CommandOptions& opt, std::ostream& log) {
  cfg.require_known({"modulus", "n", "s0", "grid_size", "dini.shells", "dini.c0",
                     "dini.max_level", "dini.tol"});
  const auto mu = parse_modulus(cfg.get_string("modulus", "power:p=1"));
  const int n = dimension(cfg);
  const double s0 = cfg.get_double("s0", default_s0(mu));
  const int grid = cfg.get_int("grid_size", 400);
  DiniOptions dopt;
  dopt.shells = cfg.get_int("dini.shells", dopt.shells);
  dopt.c0 = cfg.get_double("dini.c0", dopt.c0);
  dopt.max_level = cfg.get_int("dini.max_level", dopt.max_level);
  dopt.tol = cfg.get_double("dini.tol", dopt.tol);

  const auto t0 = std::chrono::steady_clock::now();
  const auto sv = check_slow_variation(mu, s0, grid);
  const auto dini = classify_dini(mu, dopt);
  const auto cx = check_h_convexity(Nonlinearity(mu, n), s0 * 1e-8, s0, grid);

  int code = kOk;
  std::string match = "no label";
  if (dini.dini_verdict == DiniVerdict::Inconclusive) {
    code = kInconclusive;
    match = "inconclusive";
  } else if (dini.analytic_label) {
    const bool ok = *dini.analytic_label == dini.dini_verdict;
    match = ok ? "matches label" : "MISMATCH";
    if (!ok) code = kMismatch;
  }

  log << "modulus      " << mu.spec() << "\n"
      << "s0           " << fmt(s0) << "\n"
      << "max ratio k=1  " << fmt(sv.max_ratio[0]) << "\n"
      << "max ratio k=2  " << fmt(sv.max_ratio[1]) << "\n"
      << "dini verdict " << to_string(dini.dini_verdict) << " (level " << dini.decision_level
      << ")";
  if (dini.analytic_label) log << ", label " << to_string(*dini.analytic_label);
  log << " -> " << match << "\n"
      << "convexity min  " << fmt(cx.convexity_min) << (cx.convexity_pass ? " (pass)" : " (fail)")
      << "\n";
  if (!dini.diagnostic.empty()) log << "diagnostic   " << dini.diagnostic << "\n";

  const auto dir = resolve_out_dir("classify", cfg, opt);
  ensure_dir(dir);
  Manifest m;
  echo_config(m, cfg, opt);
  m.add("modulus", mu.spec());
  m.add("s0", s0);
  m.add("max_ratio.k1", sv.max_ratio[0]);
  m.add("max_ratio.k2", sv.max_ratio[1]);
  m.add("dini_verdict", to_string(dini.dini_verdict));
  m.add("analytic_label", dini.analytic_label ? to_string(*dini.analytic_label) : "none");
  m.add("decision_level", dini.decision_level);
  m.add("integral_estimate", dini.integral_estimate);
  m.add("shell_loglog_slope", dini.shell_loglog_slope);
  m.add("convexity_min", cx.convexity_min);
  m.add("convexity_pass", cx.convexity_pass);
  m.add("exit_code", code);
  m.add("wall_time_s", seconds_since(t0));
  m.write(dir + "/manifest.txt");
  {
    std::ofstream shells(dir + "/shells.csv");
    shells << "k,S_k\n";
    for (std::size_t k = 0; k < dini.dini_partial_sums.size(); ++k)
      shells << k << ',' << format_real(dini.dini_partial_sums[k]) << "\n";
  }
  return code;
}

// ---------------------------------------------------------------------------

int cmd_linear(const Config& cfg, const CommandOptions& opt, std::ostream& log) {
  cfg.require_known(merge({kGridKeys, kDataKeys}, {"fit.t_min", "fit.t_max", "samples", "tolerance"}));
  const int n_dim = dimension(cfg);
  auto data = data_from(cfg, 1.0);
  if (!cfg.has("data.width") && n_dim == 2) data.width = 4.0;  // resolved at 1024^2
  const double t0 = cfg.get_double("fit.t_min", 50.0);
  const double t1 = cfg.get_double("fit.t_max", 2000.0);
  // Default torus: smallest integer half-length clearing the wrap condition.
  const auto grid = grid_from(cfg, auto_half_length(n_dim, data, t1), 16384, 1024);
  const int samples = cfg.get_int("samples", 24);
  const double tol = cfg.get_double("tolerance", 0.1);
  require_no_wrap(grid, data, t1);

  const auto clock0 = std::chrono::steady_clock::now();
  const auto state = make_data(grid, data);
  const auto tr = linear_trajectory(state, log_times(t0, t1, samples));
  const int n = grid.dim;
  const double total_mass = mass(state.u) + mass(state.v);
  const bool zero_data = data.amplitude <= 0.0;
  const bool nonzero_mean = !zero_data && std::abs(total_mass) > 1e-10 * data_norm(state);

  const auto dir = resolve_out_dir("linear", cfg, opt);
  ensure_dir(dir);
  Manifest m;
  echo_config(m, cfg, opt);
  m.add("data_mass", total_mass);
  int code = kOk;
  if (zero_data) {
    log << "zero data: all norms vanish, fits skipped\n";
    m.add("fits", std::string("skipped"));
  } else {
    const std::map<NormName, double> expected = {
        {NormName::Linf, -n / 2.0}, {NormName::L2, -n / 4.0}, {NormName::H1dot, -(n + 2) / 4.0}};
    for (const auto& [name, rate] : expected) {
      const auto f = decay_fit(tr.records, name, t0, t1);
      const bool ok = std::abs(f.exponent - rate) <= tol;
      log << std::left << std::setw(6) << to_string(name) << " slope " << fmt(f.exponent, 5)
          << "  expected " << fmt(rate, 4) << "  residual " << fmt(f.residual, 3);
      if (nonzero_mean) log << (ok ? "  ok" : "  OUT OF TOLERANCE");
      log << "\n";
      m.add("fit." + to_string(name) + ".exponent", f.exponent);
      m.add("fit." + to_string(name) + ".expected", rate);
      m.add("fit." + to_string(name) + ".residual", f.residual);
      if (nonzero_mean && !ok) code = kMismatch;
    }
    if (!nonzero_mean) log << "zero-mean data: rates reported, not asserted\n";
  }
  write_norms_csv(dir + "/norms.csv", tr.records);
  write_decay_plot_script(dir + "/plot_decay.py", "norms.csv");
  m.add("norms_csv", std::string("norms.csv"));
  m.add("exit_code", code);
  m.add("wall_time_s", seconds_since(clock0));
  m.write(dir + "/manifest.txt");
  log << "output " << dir << "\n";
  return code;
}

// ---------------------------------------------------------------------------

int cmd_run(const Config& cfg, const CommandOptions& opt, std::ostream& log) {
  cfg.require_known(merge({kGridKeys, kDataKeys, kEvolveKeys}));
  const auto data = data_from(cfg, 0.5);
  const auto grid = grid_from(
      cfg, std::max(512.0, auto_half_length(dimension(cfg), data, cfg.get_double("t_max", 500.0))),
      4096, 512);
  auto ecfg = evolve_from(cfg, grid, nonlinearity_from(cfg, grid.dim));
  require_no_wrap(grid, data, ecfg.t_max);
  ecfg.data = make_data(grid, data);

  const auto clock0 = std::chrono::steady_clock::now();
  const auto tr = evolve(ecfg);
  const auto dir = resolve_out_dir("run", cfg, opt);
  ensure_dir(dir);
  Manifest m;
  echo_config(m, cfg, opt);
  m.add("n", grid.dim);
  m.add("nonlinearity", ecfg.h.spec());
  m.add("data_mass", mass(ecfg.data.u) + mass(ecfg.data.v));
  m.add("data_norm", data_norm(ecfg.data));
  m.add("sample_interval", ecfg.sample_interval());
  describe_outcome(m, tr);
  const double f0 = cfg.get_double("fit.t_min", 20.0), f1 = cfg.get_double("fit.t_max", ecfg.t_max);
  if (auto fit = try_fit(tr, f0, f1)) {
    m.add("fit.Linf.exponent", fit->exponent);
    m.add("fit.Linf.residual", fit->residual);
    log << "Linf decay exponent " << fmt(fit->exponent, 4) << " on [" << f0 << ", " << f1 << "]\n";
  }
  write_norms_csv(dir + "/norms.csv", tr.records);
  write_decay_plot_script(dir + "/plot_decay.py", "norms.csv");
  write_snapshots(dir, tr);
  m.add("norms_csv", std::string("norms.csv"));
  if (!tr.snapshots.empty()) m.add("snapshots_csv", std::string("snapshots.csv"));
  m.add("wall_time_s", seconds_since(clock0));
  m.write(dir + "/manifest.txt");
  log << ecfg.h.spec() << ": " << to_string(tr.outcome.kind);
  if (tr.outcome.kind != OutcomeKind::CompletedHorizon) log << " at T_est = " << fmt(tr.outcome.t_est);
  log << ", forcing integral " << fmt(tr.forcing_integral) << "\noutput " << dir << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_sweep(const Config& cfg, const CommandOptions& opt, std::ostream& log) {
  cfg.require_known(merge({kGridKeys, kDataKeys, kEvolveKeys}, {"nonlinearities", "epsilons"}));
  const auto shape = data_from(cfg, 0.5);
  const auto grid = grid_from(
      cfg, std::max(512.0, auto_half_length(dimension(cfg), shape, cfg.get_double("t_max", 500.0))),
      4096, 512);
  auto specs = cfg.get_list("nonlinearities");
  if (specs.empty() && (cfg.has("modulus") || cfg.has("nonlinearity")))
    specs.push_back(cfg.get_string("nonlinearity", cfg.get_string("modulus", "")));
  const auto eps = cfg.get_doubles("epsilons");
  if (specs.empty()) throw ConfigError("sweep needs at least one nonlinearity");
  if (eps.empty()) throw ConfigError("sweep needs a non-empty epsilons list");
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (!(eps[i] > 0.0) || (i > 0 && !(eps[i] > eps[i - 1])))
      throw ConfigError("epsilons must be positive and increasing");

  auto base = evolve_from(cfg, grid, Nonlinearity::zero(grid.dim));
  std::vector<SweepJob> jobs;
  for (const auto& s : specs)
    for (double e : eps) jobs.push_back({parse_nonlinearity(s, grid.dim), e});
  // Validate the data shape once up front so a bad shape is a usage error.
  {
    DataSpec d = shape;
    d.amplitude = eps.back();
    require_no_wrap(grid, d, base.t_max);
    base.data = make_data(grid, d);
  }

  const auto dir = resolve_out_dir("sweep", cfg, opt);
  ensure_dir(dir);
  const auto clock0 = std::chrono::steady_clock::now();
  const double f0 = cfg.get_double("fit.t_min", 20.0), f1 = cfg.get_double("fit.t_max", base.t_max);
  auto on_done = [&](const SweepRow& row) {
    const auto sub = dir + "/run_" + std::to_string(row.index);
    ensure_dir(sub);
    Manifest m;
    echo_config(m, cfg, opt);
    m.add("nonlinearity", row.nonlinearity);
    m.add("epsilon", row.epsilon);
    m.add("ok", row.ok);
    if (!row.ok) {
      m.add("error", row.error);
    } else {
      describe_outcome(m, row.trajectory);
      if (auto fit = try_fit(row.trajectory, f0, f1)) m.add("fit.Linf.exponent", fit->exponent);
      write_norms_csv(sub + "/norms.csv", row.trajectory.records);
      m.add("norms_csv", std::string("norms.csv"));
    }
    m.write(sub + "/manifest.txt");
    log << "  [" << row.index << "] " << row.nonlinearity << " eps=" << fmt(row.epsilon) << ": "
        << (row.ok ? to_string(row.outcome.kind) : "FAILED: " + row.error);
    if (row.ok && row.outcome.kind != OutcomeKind::CompletedHorizon)
      log << " T_est=" << fmt(row.outcome.t_est);
    log << "\n";
  };
  const auto rows = run_sweep(base, shape, jobs, std::max(1, opt.workers), on_done);

  // Summary, dichotomy table and monotonicity check.
  std::ofstream csv(dir + "/summary.csv");
  csv << "index,nonlinearity,epsilon,ok,outcome,T_est,forcing_integral,final_linf,xnorm,fit_linf,error\n";
  int failures = 0;
  for (const auto& r : rows) {
    std::string fit_s;
    if (r.ok)
      if (auto f = try_fit(r.trajectory, f0, f1)) fit_s = format_real(f->exponent);
    csv << r.index << ',' << r.nonlinearity << ',' << format_real(r.epsilon) << ','
        << (r.ok ? "true" : "false") << ',' << (r.ok ? to_string(r.outcome.kind) : "") << ','
        << (r.ok ? format_real(r.outcome.t_est) : "") << ',' << format_real(r.forcing_integral)
        << ',' << format_real(r.final_linf) << ',' << format_real(r.xnorm) << ',' << fit_s << ','
        << '"' << r.error << '"' << "\n";
    failures += r.ok ? 0 : 1;
  }
  write_sweep_plot_script(dir + "/plot_lifespan.py", "summary.csv");

  std::ostringstream table;
  table << std::left << std::setw(28) << "nonlinearity \\ epsilon";
  for (double e : eps) table << std::setw(20) << fmt(e);
  table << "\n";
  int code = kOk;
  const double stride = base.sample_interval();
  for (std::size_t s = 0; s < specs.size(); ++s) {
    table << std::setw(28) << jobs[s * eps.size()].h.spec();
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (std::size_t k = 0; k < eps.size(); ++k) {
      const auto& r = rows[s * eps.size() + k];
      std::string cell = !r.ok ? "failed"
                         : r.outcome.kind == OutcomeKind::CompletedHorizon
                             ? "Completed"
                             : (r.outcome.kind == OutcomeKind::BlewUpAt ? "BlewUp@" : "Collapse@") +
                                   fmt(r.outcome.t_est, 5);
      table << std::setw(20) << cell;
      if (r.ok) {
        if (r.outcome.t_est > prev + stride) monotone = false;
        prev = r.outcome.t_est;
      }
    }
    table << (monotone ? "" : "  <- T_est not monotone in epsilon") << "\n";
    if (!monotone) code = kMismatch;
  }
  {
    std::ofstream t(dir + "/dichotomy.txt");
    t << table.str();
  }
  Manifest m;
  echo_config(m, cfg, opt);
  m.add("runs", static_cast<int>(rows.size()));
  m.add("failures", failures);
  m.add("workers", opt.workers);
  m.add("summary_csv", std::string("summary.csv"));
  m.add("exit_code", code);
  m.add("wall_time_s", seconds_since(clock0));
  m.write(dir + "/manifest.txt");
  log << table.str();
  if (failures) log << failures << " run(s) failed; see summary.csv\n";
  log << "output " << dir << "\n";
  return code;
}

// ---------------------------------------------------------------------------

int cmd_certificate(const Config& cfg, const CommandOptions& opt, std::ostream& log) {
  cfg.require_known(merge({kGridKeys, kDataKeys, kEvolveKeys},
                          {"R0", "R_min", "R_max", "R_per_octave", "trajectory", "weight_margin"}));
  const auto clock0 = std::chrono::steady_clock::now();
  std::vector<Snapshot> snaps;
  std::optional<Nonlinearity> h;
  int n = 1;
  // Integrals below this fraction of the data norm count as zero mean.
  constexpr double kMeanFloor = 1e-10;
  double data_mass = 0.0, data_scale = 0.0, t_end = 0.0, half_length = 0.0;
  if (cfg.has("trajectory")) {
    const auto tdir = cfg.get_string("trajectory", "");
    if (!fs::exists(tdir + "/manifest.txt"))
      throw ConfigError("trajectory directory '" + tdir + "' has no manifest.txt");
    const auto run = Config::from_file(tdir + "/manifest.txt");
    n = run.get_int("n", 1);
    h = parse_nonlinearity(run.get_string("nonlinearity", ""), n);
    data_mass = run.get_double("data_mass", 0.0);
    data_scale = run.get_double("data_norm", 0.0);
    snaps = read_snapshots(tdir);
  } else {
    const auto data = data_from(cfg, 0.5);
    const auto grid = grid_from(
        cfg, std::max(512.0, auto_half_length(dimension(cfg), data, cfg.get_double("t_max", 500.0))),
        4096, 512);
    n = grid.dim;
    auto ecfg = evolve_from(cfg, grid, nonlinearity_from(cfg, n));
    if (!cfg.has("snapshot_every"))
      ecfg.snapshot_every = std::max(1, static_cast<int>(std::lround(1.0 / ecfg.sample_interval())));
    require_no_wrap(grid, data, ecfg.t_max);
    ecfg.data = make_data(grid, data);
    data_mass = mass(ecfg.data.u) + mass(ecfg.data.v);
    data_scale = data_norm(ecfg.data);
    if (!(data_mass > kMeanFloor * data_scale))
      throw ConfigError("certificate needs data with positive integral (got " + fmt(data_mass) + ")");
    h = ecfg.h;
    auto tr = evolve(ecfg);
    snaps = std::move(tr.snapshots);
    log << "trajectory: " << to_string(tr.outcome.kind) << ", " << snaps.size() << " snapshots\n";
  }
  if (!(data_mass > kMeanFloor * data_scale))
    throw ConfigError("certificate needs data with positive integral (got " + fmt(data_mass) + ")");
  if (!h->modulus()) throw ConfigError("certificate needs a modulus-type nonlinearity");
  t_end = snaps.back().t;
  half_length = snaps.front().u.spec().half_length;

  const double R0 = cfg.get_double("R0", 16.0);
  const double R_min = cfg.get_double("R_min", 4.0);
  const double R_max = cfg.get_double("R_max", std::min(t_end, half_length * half_length));
  const int per_octave = cfg.get_int("R_per_octave", 4);
  if (!(R_min > 0.0) || !(R0 >= R_min) || !(R_max > R0) || per_octave < 1)
    throw ConfigError("need 0 < R_min <= R0 < R_max and R_per_octave >= 1");
  std::vector<double> R_grid;
  for (int k = 0;; ++k) {
    const double R = R_min * std::pow(2.0, static_cast<double>(k) / per_octave);
    if (R > R_max * (1 + 1e-12)) break;
    R_grid.push_back(R);
  }
  R_grid.push_back(R0);
  std::sort(R_grid.begin(), R_grid.end());
  std::vector<double> uniq;
  for (double R : R_grid)
    if (uniq.empty() || std::abs(R - uniq.back()) > 1e-9 * R) uniq.push_back(R);
    else if (std::abs(R - R0) <= 1e-9 * R0) uniq.back() = R0;
  R_grid = uniq;

  const auto samples = tf::collect_samples(snaps, *h, R_grid.back());
  const auto f = tf::functional_Y(samples, R_grid);
  const double C = tf::weight_constant(n, R0, cfg.get_double("weight_margin", 1e-3));
  const auto wb = tf::check_weight_bound(n, R0, C, 201, n == 1 ? 401 : 101);
  const auto cert = tf::blowup_certificate(f, *h->modulus(), n, R0, C, data_mass);

  const auto dir = resolve_out_dir("certificate", cfg, opt);
  ensure_dir(dir);
  {
    std::ofstream csv(dir + "/functionals.csv");
    csv << "R,I_R,y,Y,Y_over_log2_I,lhs\n";
    for (std::size_t k = 0; k < f.R.size(); ++k) {
      std::string lhs;
      for (std::size_t j = 0; j < cert.R.size(); ++j)
        if (cert.R[j] == f.R[k]) lhs = format_real(cert.lhs[j]);
      csv << format_real(f.R[k]) << ',' << format_real(f.I[k]) << ',' << format_real(f.y[k]) << ','
          << format_real(f.Y[k]) << ','
          << format_real(f.I[k] > 0 ? f.Y[k] / (std::log(2.0) * f.I[k]) : 0.0) << ',' << lhs << "\n";
    }
  }
  write_certificate_plot_script(dir + "/plot_functionals.py", "functionals.csv");
  const int code = (f.bound_holds && wb.violations == 0) ? kOk : kMismatch;
  Manifest m;
  echo_config(m, cfg, opt);
  m.add("nonlinearity", h->spec());
  m.add("n", n);
  m.add("data_mass", data_mass);
  m.add("R0", R0);
  m.add("weight_constant", C);
  m.add("weight_bound.max_ratio", wb.max_ratio);
  m.add("weight_bound.violations", static_cast<int>(wb.violations));
  m.add("Y_le_log2_I", f.bound_holds);
  m.add("Y_over_log2_I.max", f.max_ratio_to_bound);
  m.add("kappa", cert.kappa);
  m.add("c1", cert.c1);
  m.add("c2", cert.c2);
  m.add("Y_R0", cert.Y_R0);
  m.add("rhs", cert.rhs);
  m.add("lhs_at_R_max", cert.lhs.empty() ? 0.0 : cert.lhs.back());
  m.add("lhs_limit", cert.lhs_limit);
  m.add("witness", cert.witness);
  m.add("witness_in_grid", cert.witness_in_grid);
  m.add("log_R_witness", cert.log_R_witness);
  m.add("loglog_R_witness", cert.loglog_R_witness);
  m.add("verdict", cert.verdict);
  m.add("exit_code", code);
  m.add("wall_time_s", seconds_since(clock0));
  m.write(dir + "/certificate.txt");
  log << "weight constant C = " << fmt(C) << " (grid max ratio " << fmt(wb.max_ratio, 4) << ", "
      << wb.violations << " violations)\n"
      << "Y(R) <= log2 I_R: " << (f.bound_holds ? "holds" : "FAILS") << " (max ratio "
      << fmt(f.max_ratio_to_bound, 4) << ")\n"
      << "c1 = " << fmt(cert.c1) << ", c2 = " << fmt(cert.c2) << ", Y(R0) = " << fmt(cert.Y_R0)
      << "\nleft side at R = " << fmt(cert.R.back()) << ": " << fmt(cert.lhs.back())
      << ", right side " << fmt(cert.rhs) << "\n"
      << cert.verdict << "\noutput " << dir << "\n";
  return code;
}

// ---------------------------------------------------------------------------

int dispatch(const std::string& command, const Config& cfg, const CommandOptions& opt,
             std::ostream& log, std::ostream& err) {
  try {
    if (command == "classify") return cmd_classify(cfg, opt, log);
    if (command == "linear") return cmd_linear(cfg, opt, log);
    if (command == "run") return cmd_run(cfg, opt, log);
    if (command == "sweep") return cmd_sweep(cfg, opt, log);
    if (command == "certificate") return cmd_certificate(cfg, opt, log);
    err << "unknown command '" << command << "'\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
  } catch (const std::domain_error& e) {
    err << "invalid input: " << e.what() << "\n";
  }
  return kUsage;
}

}  // namespace dwlab::app
