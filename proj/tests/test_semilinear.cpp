#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "dwlab/semilinear.hpp"
#include "oracles.hpp"

using namespace dwlab;

namespace {

EvolveConfig base_config(const GridSpec& g, Nonlinearity h, double eps, double t_max) {
  EvolveConfig c;
  c.grid = g;
  c.h = std::move(h);
  DataSpec d;
  d.amplitude = eps;
  require_no_wrap(g, d, t_max);
  c.data = make_data(g, d);
  c.t_max = t_max;
  return c;
}

WaveState constant_state(const GridSpec& g, double u, double v) {
  return WaveState(0.0, GridField(g, std::vector<double>(g.size(), u)),
                   GridField(g, std::vector<double>(g.size(), v)));
}

}  // namespace

TEST_CASE("zero nonlinearity reduces to the linear flow") {
  const GridSpec g(1, 30.0, 512);
  DataSpec d;
  d.amplitude = 0.3;
  d.slot = DataSlot::Both;
  const auto s = make_data(g, d);
  const auto a = step(s, 0.05, Nonlinearity::zero(1));
  const auto b = propagate(s, 0.05);
  CHECK(lp_norm(a.u - b.u, LpNorm::Linf) < 1e-12 * lp_norm(b.u, LpNorm::Linf));
  CHECK(lp_norm(a.v - b.v, LpNorm::Linf) < 1e-12 * lp_norm(b.v, LpNorm::Linf));
  CHECK(a.t == doctest::Approx(0.05));
}

TEST_CASE("spatially constant state follows the scalar ODE") {
  const GridSpec g(1, 4.0, 16);
  const auto h = parse_nonlinearity("pure:q=2", 1);
  auto fh = [&](double u) { return h.eval(u); };
  const double u0 = 0.6, v0 = 0.1;

  // local error O(dt^3)
  double prev = 0.0;
  for (double dt : {0.2, 0.1, 0.05}) {
    const auto s = step(constant_state(g, u0, v0), dt, h);
    const auto ref = oracle::scalar_ode(fh, u0, v0, dt);
    const double err = std::abs(s.u[0] - ref[0]) + std::abs(s.v[0] - ref[1]);
    if (prev > 0) CHECK(prev / err == doctest::Approx(8.0).epsilon(0.1));
    prev = err;
  }

  // global error O(dt^2) at T = 2
  const double T = 2.0;
  const auto ref = oracle::scalar_ode(fh, u0, v0, T);
  prev = 0.0;
  for (double dt : {0.1, 0.05, 0.025}) {
    Stepper st(g, h);
    auto s = constant_state(g, u0, v0);
    const int n = static_cast<int>(std::lround(T / dt));
    for (int i = 0; i < n; ++i) s = st.step(s, dt);
    const double err = std::abs(s.u[0] - ref[0]);
    if (prev > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("non-finite step raises BlowupSignal") {
  const GridSpec g(1, 4.0, 16);
  auto s = constant_state(g, 1e300, 0.0);
  CHECK_THROWS_AS(step(s, 0.1, parse_nonlinearity("pure:q=2", 1)), BlowupSignal);
}

TEST_CASE("config validation") {
  const GridSpec g(1, 40.0, 256);
  auto c = base_config(g, Nonlinearity::zero(1), 0.1, 5.0);
  CHECK_NOTHROW(c.validate());
  auto bad = c;
  bad.dt = 0.0;
  CHECK_THROWS(bad.validate());
  bad = c;
  bad.sample_stride = 0;
  CHECK_THROWS(bad.validate());
  bad = c;
  bad.t_max = -1.0;
  CHECK_THROWS(bad.validate());
  bad = c;
  bad.h = Nonlinearity::zero(2);
  CHECK_THROWS(bad.validate());
  CHECK_THROWS(evolve(bad));
}

TEST_CASE("zero data gives the zero trajectory") {
  const GridSpec g(1, 40.0, 256);
  auto c = base_config(g, parse_nonlinearity("invlog:p=1", 1), 0.0, 10.0);
  const auto tr = evolve(c);
  CHECK(tr.outcome.kind == OutcomeKind::CompletedHorizon);
  CHECK(std::isinf(tr.outcome.t_est));
  for (const auto& r : tr.records) CHECK(r.linf == 0.0);
  CHECK(xnorm(tr) == 0.0);
  CHECK(tr.records.back().t == doctest::Approx(10.0));
}

TEST_CASE("global-existence class decays at the linear rate") {
  const GridSpec g(1, 512.0, 4096);
  auto c = base_config(g, parse_nonlinearity("invlog:p=2", 1), 1e-2, 500.0);
  const auto tr = evolve(c);
  REQUIRE(tr.outcome.kind == OutcomeKind::CompletedHorizon);
  CHECK(std::abs(decay_fit(tr.records, NormName::Linf, 20.0, 500.0).exponent + 0.5) <= 0.1);
  double prev = 0.0;
  for (const auto& r : tr.records) {
    CHECK(r.xnorm >= prev);
    prev = r.xnorm;
  }
}

TEST_CASE("sub-Fujita oracle blows up with shrinking lifespan") {
  const GridSpec g(1, 256.0, 2048);
  auto c = base_config(g, parse_nonlinearity("pure:q=1.5", 1), 0.5, 100.0);
  DataSpec shape;
  const auto rows = lifespan_sweep(c, shape, {0.5, 1.0, 2.0}, 2);
  double prev = INFINITY;
  for (const auto& r : rows) {
    REQUIRE(r.ok);
    CHECK(r.outcome.kind == OutcomeKind::BlewUpAt);
    CHECK(r.outcome.t_est < prev);
    prev = r.outcome.t_est;
  }
  // X-norm climbs to the threshold
  const auto& recs = rows[0].trajectory.records;
  for (std::size_t i = 1; i < recs.size(); ++i) CHECK(recs[i].xnorm >= recs[i - 1].xnorm);
  CHECK(recs.back().linf > c.blowup_threshold);
  CHECK_THROWS(lifespan_sweep(c, shape, {1.0, 0.5}, 1));
}

TEST_CASE("sweeps do not depend on the worker count") {
  const GridSpec g(1, 128.0, 1024);
  auto c = base_config(g, Nonlinearity::zero(1), 0.5, 30.0);
  std::vector<SweepJob> jobs;
  for (const char* s : {"pure:q=1.5", "invlog:p=1", "invlog:p=2"})
    for (double e : {0.5, 2.0}) jobs.push_back({parse_nonlinearity(s, 1), e});
  const auto a = run_sweep(c, DataSpec{}, jobs, 1);
  const auto b = run_sweep(c, DataSpec{}, jobs, 3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].index == i);
    CHECK(a[i].outcome.kind == b[i].outcome.kind);
    CHECK(a[i].outcome.t_est == b[i].outcome.t_est);
    CHECK(a[i].forcing_integral == b[i].forcing_integral);
    CHECK(a[i].final_linf == b[i].final_linf);
  }
  // a failing job is isolated
  jobs.push_back({parse_nonlinearity("invlog:p=1", 2), 1.0});
  const auto f = run_sweep(c, DataSpec{}, jobs, 2);
  CHECK_FALSE(f.back().ok);
  CHECK_FALSE(f.back().error.empty());
  CHECK(f.front().ok);
}

TEST_CASE("Picard iteration against the split step") {
  const GridSpec g(1, 32.0, 512);
  auto c = base_config(g, Nonlinearity::zero(1), 1e-3, 1.0);
  c.dt = 0.01;
  const auto z = picard_verify(c, 1.0, 3);
  for (double x : z.corrections) CHECK(x == 0.0);
  CHECK(z.contraction_factor == 0.0);

  c.h = parse_nonlinearity("power:p=1", 1);
  const auto r1 = picard_verify(c, 1.0, 4);
  CHECK(r1.contraction_factor < 0.1);
  CHECK(r1.mismatch_linf < 1e-4);

  // h(2u) = 16 h(u) for |u|^3 * |u|
  auto c2 = base_config(g, c.h, 2e-3, 1.0);
  c2.dt = 0.01;
  const auto r2 = picard_verify(c2, 1.0, 4);
  CHECK(r2.corrections[0] / r1.corrections[0] == doctest::Approx(16.0).epsilon(1e-6));
}
