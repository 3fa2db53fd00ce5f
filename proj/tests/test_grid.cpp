#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <random>

#include "dwlab/grid.hpp"
#include "oracles.hpp"

using namespace dwlab;

namespace {

const double kPi = std::acos(-1.0);

GridField gauss(const GridSpec& g, double w = 1.0, double c = 0.0) {
  return GridField::from_function(g, [&](double x, double y) {
    return std::exp(-((x - c) * (x - c) + (g.dim == 2 ? y * y : 0.0)) / (w * w));
  });
}

// Smooth random field: a few Gaussians with random centers, widths, signs.
GridField random_smooth(const GridSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-3.0, 3.0), w(0.6, 2.0), a(-1.0, 1.0);
  std::vector<std::array<double, 4>> bumps(4);
  for (auto& b : bumps) b = {c(rng), c(rng), w(rng), a(rng)};
  return GridField::from_function(g, [&](double x, double y) {
    double s = 0.0;
    for (const auto& b : bumps) {
      const double r2 = (x - b[0]) * (x - b[0]) + (g.dim == 2 ? (y - b[1]) * (y - b[1]) : 0.0);
      s += b[3] * std::exp(-r2 / (b[2] * b[2]));
    }
    return s;
  });
}

}  // namespace

TEST_CASE("grid spec validation") {
  CHECK_THROWS_AS(GridSpec(3, 1.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(1, -1.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(1, 1.0, 100), std::invalid_argument);
  const GridSpec g(2, 10.0, 64);
  CHECK(g.size() == 64u * 64u);
  CHECK(g.spectral_size() == 64u * 33u);
  CHECK(g.wavenumber(1) == doctest::Approx(kPi / 10.0));
  CHECK(g.wavenumber(63) == doctest::Approx(-kPi / 10.0));
  CHECK(g.diff_wavenumber(32) == 0.0);
}

TEST_CASE("lp norms") {
  const GridSpec g(1, 1.0, 64);
  const GridField c(g, std::vector<double>(64, -0.7));
  CHECK(lp_norm(c, LpNorm::L1) == doctest::Approx(1.4).epsilon(1e-14));
  CHECK(lp_norm(c, LpNorm::L2) == doctest::Approx(0.7 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(lp_norm(c, LpNorm::Linf) == doctest::Approx(0.7).epsilon(1e-15));

  const GridSpec g20(1, 20.0, 1024);
  CHECK(lp_norm(gauss(g20), LpNorm::L1) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-8));
  CHECK(lq_power(gauss(g20), 3.0) ==
        doctest::Approx(oracle::gk([](double x) { return std::exp(-3 * x * x); }, -20, 20)).epsilon(1e-10));

  const GridField z(g20);
  for (auto p : {LpNorm::L1, LpNorm::L2, LpNorm::Linf}) CHECK(lp_norm(z, p) == 0.0);

  auto bad = gauss(g20);
  bad.values()[17] = std::nan("");
  bad.values()[40] = INFINITY;
  try {
    lp_norm(bad, LpNorm::L2);
    FAIL("expected NonFiniteError");
  } catch (const NonFiniteError& e) {
    CHECK(e.index() == 17u);
  }
}

TEST_CASE("spectral gradient") {
  const double L = 3.0;
  const GridSpec g(1, L, 64);
  const auto s = GridField::from_function(g, [&](double x, double) { return std::sin(kPi * x / L); });
  const auto d = spectral_gradient(s)[0];
  double err = 0.0;
  for (int i = 0; i < 64; ++i)
    err = std::max(err, std::abs(d.values()[i] - kPi / L * std::cos(kPi * g.coord(i) / L)));
  CHECK(err < 1e-12);

  const GridField c(g, std::vector<double>(64, 2.5));
  CHECK(lp_norm(spectral_gradient(c)[0], LpNorm::Linf) < 1e-14);

  const GridSpec g20(1, 20.0, 512);
  const auto dg = spectral_gradient(gauss(g20))[0];
  err = 0.0;
  for (int i = 0; i < 512; ++i) {
    const double x = g20.coord(i);
    err = std::max(err, std::abs(dg.values()[i] + 2 * x * std::exp(-x * x)));
  }
  CHECK(err < 1e-10);

  // linearity, 2-d
  std::mt19937_64 rng(3);
  const GridSpec g2(2, 10.0, 64);
  const auto a = random_smooth(g2, rng), b = random_smooth(g2, rng);
  const auto lhs = spectral_gradient(2.0 * a + b);
  const auto ga = spectral_gradient(a), gb = spectral_gradient(b);
  for (int k = 0; k < 2; ++k)
    CHECK(lp_norm(lhs[k] - (2.0 * ga[k] + gb[k]), LpNorm::Linf) < 1e-12);
}

TEST_CASE("sobolev norms") {
  const GridSpec g(1, kPi, 64);
  CHECK(sobolev_norm(GridField(g), 0) == 0.0);
  CHECK(sobolev_norm(GridField(g), 2) == 0.0);
  const auto s = GridField::from_function(g, [](double x, double) { return std::sin(x); });
  CHECK(sobolev_norm(s, 1) == doctest::Approx(std::sqrt(2 * kPi)).epsilon(1e-13));
  CHECK(sobolev_norm(s, 2) == doctest::Approx(std::sqrt(4 * kPi)).epsilon(1e-13));
  CHECK(hdot1_norm(s) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-13));

  // product structure: |g (x) g|^2_{H^k} from the 1-d norms
  const GridSpec g1(1, 12.0, 256), g2(2, 12.0, 256);
  const auto u1 = gauss(g1), u2 = gauss(g2);
  const double a0 = std::pow(sobolev_norm(u1, 0), 2), a1 = std::pow(sobolev_norm(u1, 1), 2),
               a2 = std::pow(sobolev_norm(u1, 2), 2);
  CHECK(std::pow(sobolev_norm(u2, 0), 2) == doctest::Approx(a0 * a0).epsilon(1e-12));
  CHECK(std::pow(sobolev_norm(u2, 1), 2) == doctest::Approx(2 * a1 * a0 - a0 * a0).epsilon(1e-12));
  // (1 + x + y)^2 with x, y = xi_1^2, xi_2^2, written through (1+x), (1+y)
  const double expect2 = 2 * a2 * a0 + 2 * a1 * a1 - 4 * a1 * a0 + a0 * a0;
  CHECK(std::pow(sobolev_norm(u2, 2), 2) == doctest::Approx(expect2).epsilon(1e-12));
  CHECK_THROWS(sobolev_norm(u1, 3));
}

TEST_CASE("Parseval and torus norm inequalities") {
  std::mt19937_64 rng(11);
  for (int dim : {1, 2}) {
    const GridSpec g(dim, 6.0, dim == 1 ? 256 : 64);
    const double vol = g.volume();
    for (int trial = 0; trial < 20; ++trial) {
      const auto u = random_smooth(g, rng);
      const double l2 = lp_norm(u, LpNorm::L2);
      CHECK(l2_norm_spectral(u) == doctest::Approx(l2).epsilon(1e-12));
      CHECK(lp_norm(u, LpNorm::L1) <= std::sqrt(vol) * l2 * (1 + 1e-14));
      CHECK(l2 <= std::sqrt(vol) * lp_norm(u, LpNorm::Linf) * (1 + 1e-14));
    }
  }
}

TEST_CASE("Gagliardo-Nirenberg ratios") {
  std::mt19937_64 rng(5);
  const GridSpec g2(2, 10.0, 128);
  for (int trial = 0; trial < 10; ++trial)
    CHECK(gn_check(random_smooth(g2, rng)).ratio_lq == doctest::Approx(1.0).epsilon(1e-12));

  const GridSpec g1(1, 20.0, 4096);
  const auto u = gauss(g1);
  auto I = [](const std::function<double(double)>& f) { return oracle::gk(f, -20.0, 20.0); };
  const double l3 = I([](double x) { return std::exp(-3 * x * x); });
  const double l2 = std::sqrt(I([](double x) { return std::exp(-2 * x * x); }));
  const double d2 = std::sqrt(I([](double x) { return 4 * x * x * std::exp(-2 * x * x); }));
  CHECK(gn_check(u).ratio_lq == doctest::Approx(l3 / (std::sqrt(d2) * std::pow(l2, 2.5))).epsilon(1e-10));

  const double r1 = gn_check(u).ratio_lq, s1 = gn_check(u).ratio_l2q;
  for (double lam : {2.0, 4.0}) {
    const auto ul = GridField::from_function(g1, [&](double x, double) { return std::exp(-lam * lam * x * x); });
    CHECK(gn_check(ul).ratio_lq == doctest::Approx(r1).epsilon(1e-6));
    CHECK(gn_check(ul).ratio_l2q == doctest::Approx(s1).epsilon(1e-6));
  }
  CHECK_THROWS(gn_check(GridField(g1)));
}

TEST_CASE("field files round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "dwlab_grid_test";
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(9);
  for (int dim : {1, 2}) {
    const GridSpec g(dim, 7.5, 32);
    const auto u = random_smooth(g, rng);
    const auto path = (dir / ("f" + std::to_string(dim) + ".bin")).string();
    write_field(path, u, 3.25);
    double t = 0.0;
    const auto back = read_field(path, &t);
    CHECK(t == 3.25);
    CHECK(back.spec() == g);
    CHECK(back.data() == u.data());
  }
  CHECK_THROWS(read_field((dir / "missing.bin").string()));
  std::filesystem::remove_all(dir);
}
