#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace dwlab::quad {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
  bool finite = true;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes on [0, 1] (symmetric half), Kronrod weights and
// the embedded Gauss weights for the odd-indexed nodes.
inline constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kKronrod[7];
  double gauss = fc * kGauss[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kNodes[j];
    const double s = f(c - dx) + f(c + dx);
    kron += kKronrod[j] * s;
    if (j % 2 == 1) gauss += kGauss[j / 2] * s;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// Stops when the summed error estimate is below max(abs_tol, rel_tol*|I|).
template <class F>
QuadResult integrate(const F& f, double a, double b, double abs_tol = 1e-10,
                     double rel_tol = 1e-12, std::size_t max_panels = 4000) {
  QuadResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<detail::Panel> heap;
  auto first = detail::gk15(f, a, b);
  out.evaluations = 15;
  double total = first.value;
  double err = first.error;
  heap.push(first);
  while (true) {
    if (!std::isfinite(total) || !std::isfinite(err)) {
      out.finite = false;
      break;
    }
    if (err <= std::max(abs_tol, rel_tol * std::abs(total))) {
      out.converged = true;
      break;
    }
    if (heap.size() >= max_panels) break;
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum from the panels to shed the drift of the running update.
  double sum = 0.0, esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  out.value = sum;
  out.error = esum;
  if (!std::isfinite(sum)) out.finite = false;
  return out;
}

}  // namespace dwlab::quad
