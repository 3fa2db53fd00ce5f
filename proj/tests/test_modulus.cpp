#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dwlab/modulus.hpp"
#include "oracles.hpp"

using namespace dwlab;

namespace {

const double kE = std::exp(1.0);

std::vector<Modulus> catalog() {
  return {Modulus::power(0.5),     Modulus::power(1.0),     Modulus::log_plus(1.0),
          Modulus::inv_log(0.5),   Modulus::inv_log(1.0),   Modulus::inv_log(2.0),
          Modulus::iter_log(1.0, 1), Modulus::iter_log(2.0, 1)};
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return s;
}

}  // namespace

TEST_CASE("catalog construction and labels") {
  CHECK(Modulus::power(1.0).eval(0.3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(Modulus::power(1.0).analytic_dini_label() == DiniVerdict::Convergent);
  CHECK(Modulus::inv_log(1.0).analytic_dini_label() == DiniVerdict::Divergent);
  // the formula branch must reach e^-2, so s* is given explicitly
  CHECK(Modulus::inv_log(2.0, std::exp(-2.0)).eval(std::exp(-2.0)) ==
        doctest::Approx(0.25).epsilon(1e-14));
  // default s* keeps mu concave: (log 1/s)^-p is concave for log(1/s) > p + 1
  CHECK(Modulus::inv_log(2.0).continuation_point() == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(Modulus::inv_log(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Modulus::power(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(parse_modulus("iterlog:p=1,depth=1.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_modulus("invlog:p=0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_modulus("cubic:p=1"), std::invalid_argument);
}

TEST_CASE("parse round trip") {
  for (const auto& m : catalog()) {
    const auto back = parse_modulus(m.spec());
    CHECK(back.spec() == m.spec());
    CHECK(back.eval(1e-3) == m.eval(1e-3));
  }
}

TEST_CASE("eval examples") {
  CHECK(Modulus::power(2.0).eval(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(Modulus::log_plus(1.0).eval(kE - 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  // (log 1/s)^-1 (log log 1/s)^-1 at s = e^-e: 1/(e * 1)
  const long double w = std::exp(1.0L);
  const long double ref = 1.0L / (w * std::log(w));
  CHECK(Modulus::iter_log(1.0, 1, std::exp(-kE)).eval(std::exp(-kE)) ==
        doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
}

TEST_CASE("deriv examples") {
  CHECK(Modulus::power(2.0).deriv(0.1, 1) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(Modulus::power(2.0).deriv(0.1, 2) == doctest::Approx(2.0).epsilon(1e-14));
  // d/ds (log 1/s)^-1 = (1/s)(log 1/s)^-2
  const double s = std::exp(-2.0);
  CHECK(Modulus::inv_log(1.0).deriv(s * 0.999, 1) ==
        doctest::Approx(1.0 / (s * 0.999) / std::pow(std::log(1.0 / (s * 0.999)), 2)).epsilon(1e-12));
  CHECK(Modulus::inv_log(1.0).deriv(s, 1) == doctest::Approx(kE * kE / 4.0).epsilon(1e-12));
  CHECK_THROWS(Modulus::inv_log(1.0).deriv(0.0, 1));
}

TEST_CASE("monotone, concave, vanishing at zero") {
  for (const auto& m : catalog()) {
    CAPTURE(m.spec());
    CHECK(m.eval(0.0) == 0.0);
    auto s = log_grid(1e-12, 10.0, 400);
    s.insert(s.begin(), 0.0);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(m.eval(s[i - 1]) <= m.eval(s[i]));
    // midpoint concavity on a uniform grid
    for (int i = 0; i + 2 <= 400; ++i) {
      const double a = 0.025 * i, b = a + 0.05;
      CHECK(m.eval(0.5 * (a + b)) >= 0.5 * (m.eval(a) + m.eval(b)) * (1 - 1e-14));
    }
  }
}

TEST_CASE("continuation is C1 at s*") {
  for (const auto& m : catalog()) {
    const double ss = m.continuation_point();
    if (!std::isfinite(ss)) continue;
    CAPTURE(m.spec());
    CHECK(m.eval(ss * (1 - 1e-13)) == doctest::Approx(m.eval(ss * (1 + 1e-13))).epsilon(1e-12));
    CHECK(m.deriv(ss * (1 - 1e-13), 1) == doctest::Approx(m.deriv(ss * (1 + 1e-13), 1)).epsilon(1e-10));
  }
}

TEST_CASE("analytic vs finite-difference derivatives") {
  // Richardson-extrapolated central differences of eval, stencil kept below s*
  auto fd = [](const Modulus& m, double s, int k) {
    auto c = [&](double h) {
      return k == 1 ? (m.eval(s + h) - m.eval(s - h)) / (2 * h)
                    : (m.eval(s + h) - 2 * m.eval(s) + m.eval(s - h)) / (h * h);
    };
    const double h = (k == 1 ? 1e-3 : 1e-2) * s;
    return (4 * c(h / 2) - c(h)) / 3;
  };
  for (const auto& m : catalog()) {
    CAPTURE(m.spec());
    const double hi = std::min(m.continuation_point(), 1.0) * 0.95;
    for (double s : log_grid(1e-6, hi, 40)) {
      CAPTURE(s);
      CHECK(m.deriv(s, 1) == doctest::Approx(fd(m, s, 1)).epsilon(1e-6));
      // second differences lose ~eps mu / h^2 to cancellation
      const double floor = 1e-13 * m.eval(s) / std::pow(5e-3 * s, 2);
      if (m.kind() != ModulusKind::Power || m.p() != 1.0)
        CHECK(std::abs(m.deriv(s, 2) - fd(m, s, 2)) <= 1e-6 * std::abs(m.deriv(s, 2)) + floor);
      else
        CHECK(std::abs(m.deriv(s, 2)) < 1e-12);
    }
  }
}

TEST_CASE("slow variation ratios") {
  // k = 1 ratio of a pure power is p
  const auto r = check_slow_variation(Modulus::power(0.5), 0.1, 200);
  CHECK(r.max_ratio[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(r.max_ratio[1] == doctest::Approx(0.25).epsilon(1e-6));

  // InvLog p=2: s mu'/mu = p / log(1/s), largest at s0
  double prev = 1e9;
  for (double s0 : {1e-2, 1e-4, 1e-8, 1e-16}) {
    const auto rr = check_slow_variation(Modulus::inv_log(2.0), s0, 200);
    CHECK(rr.max_ratio[0] == doctest::Approx(2.0 / std::log(1.0 / s0)).epsilon(1e-6));
    CHECK(rr.max_ratio[0] < prev);
    prev = rr.max_ratio[0];
  }

  // LogPlus p=1: s / ((1+s) log(1+s)) <= 1
  const auto lp = check_slow_variation(Modulus::log_plus(1.0), 1.0, 400);
  CHECK(lp.max_ratio[0] <= 1.0);
  CHECK(lp.max_ratio[0] > 0.99);
}

TEST_CASE("Dini classification of the catalog") {
  for (const auto& m : catalog()) {
    CAPTURE(m.spec());
    const auto r = classify_dini(m);
    REQUIRE(m.analytic_dini_label().has_value());
    CHECK(r.dini_verdict == *m.analytic_dini_label());
    for (double x : r.dini_partial_sums) CHECK(x >= 0.0);
  }
}

TEST_CASE("Dini shells and tails") {
  // Power p=1: S_k = a 2^-k-1, ratio 1/2
  const auto pw = classify_dini(Modulus::power(1.0));
  for (std::size_t k = 1; k < 10; ++k)
    CHECK(pw.dini_partial_sums[k] / pw.dini_partial_sums[k - 1] == doctest::Approx(0.5).epsilon(1e-8));

  // InvLog p=2: int_0^a dt / (t log(1/t)^2) = 1/log(1/a)
  DiniOptions o;
  const auto il = classify_dini(Modulus::inv_log(2.0), o);
  CHECK(il.integral_estimate == doctest::Approx(1.0 / std::log(o.c0)).epsilon(1e-3));
  // cross-check one shell against independent quadrature
  const double a = 1.0 / o.c0;
  const auto mu = Modulus::inv_log(2.0);
  const double S3 = oracle::gk([&](double t) { return mu.eval(t) / t; }, a * std::pow(2.0, -4), a * std::pow(2.0, -3));
  CHECK(il.dini_partial_sums[3] == doctest::Approx(S3).epsilon(1e-9));

  // InvLog p=1: S_k ~ log 2 / k in the shell index measured from 0
  const auto d = classify_dini(Modulus::inv_log(1.0));
  const auto& S = d.dini_partial_sums;
  const double k = static_cast<double>(S.size() - 1);
  const double w = std::log(o.c0) + k * std::log(2.0);
  CHECK(S.back() == doctest::Approx(std::log1p(std::log(2.0) / w)).epsilon(1e-8));
}

TEST_CASE("nonlinearity h") {
  const auto h2 = Nonlinearity(Modulus::power(1.0), 2);
  CHECK(h2.exponent() == 2.0);
  CHECK(h2.eval(0.5) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(Nonlinearity(Modulus::inv_log(1.0), 1).eval(0.0) == 0.0);
  const long double s = std::exp(-2.0L);
  const double ref = static_cast<double>(s * s * 0.25L);
  CHECK(Nonlinearity(Modulus::inv_log(2.0, std::exp(-2.0)), 2).eval(static_cast<double>(s)) ==
        doctest::Approx(ref).epsilon(1e-14));
  // factor cross-check and sign-free evaluation
  const auto h1 = Nonlinearity(Modulus::inv_log(1.0), 1);
  for (double x : {1e-5, 3e-3, 0.05, 0.5, 2.0}) {
    CHECK(h1.eval(x) == doctest::Approx(std::pow(x, 3.0) * Modulus::inv_log(1.0).eval(x)).epsilon(1e-14));
    CHECK(h1.eval(-x) == h1.eval(x));
    CHECK(h1.inverse(h1.eval(x)) == doctest::Approx(x).epsilon(1e-10));
  }
  // non-decreasing on [0, s0]
  double prev = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = h1.eval(1e-4 * i);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(parse_nonlinearity("zero", 1).is_zero());
  CHECK(parse_nonlinearity("pure:q=1.5", 1).eval(4.0) == doctest::Approx(8.0));
}

TEST_CASE("convexity of h") {
  const auto c3 = check_h_convexity(Nonlinearity(Modulus::power(1.0), 2), 1e-6, 1.0, 200);
  CHECK(c3.convexity_pass);
  const auto lp = check_h_convexity(Nonlinearity(Modulus::log_plus(1.0), 2), 1e-6, 1.0, 200);
  CHECK(lp.convexity_pass);
  CHECK(lp.convexity_min >= 0.0);

  // n=1, InvLog p=1: h''/s = 6 mu + 6 s mu' + s^2 mu'' -> 6 mu(1 + o(1))
  const auto mu = Modulus::inv_log(1.0);
  const auto h = Nonlinearity(mu, 1);
  auto bracket_ratio = [&](double s) {
    const double d = 1e-4 * s;
    const double h2 = (h.deriv(s + d) - h.deriv(s - d)) / (2 * d);
    return h2 / s / (6.0 * mu.eval(s));
  };
  double prev = 1e9;
  for (double s : {1e-2, 1e-4, 1e-8, 1e-16}) {
    const double dev = std::abs(bracket_ratio(s) - 1.0);
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(check_h_convexity(h, 1e-12, 0.1, 200).convexity_pass);
}
