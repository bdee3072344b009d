#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include "sfp/errors.hpp"

namespace sfp {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  std::size_t max_intervals = 5000;
};

namespace detail {

struct GkEstimate {
  double a, b, value, error;
  bool operator<(const GkEstimate& o) const { return error < o.error; }
};

// 7-point Gauss / 15-point Kronrod pair on [a, b].
template <class F>
GkEstimate gauss_kronrod15(F& f, double a, double b) {
  static constexpr std::array<double, 8> xk{
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wk{
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  // Gauss weights for the odd Kronrod nodes xk[1], xk[3], xk[5], xk[7].
  static constexpr std::array<double, 4> wg{
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = wk[7] * fc;
  double gauss = wg[3] * fc;
  for (std::size_t i = 0; i < 7; ++i) {
    const double sum = f(c - h * xk[i]) + f(c + h * xk[i]);
    kronrod += wk[i] * sum;
    if (i % 2 == 1) gauss += wg[i / 2] * sum;
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over the finite
/// interval [a, b]: the interval with the largest error estimate is bisected
/// until the summed error meets max(abs_tol, rel_tol * |value|).
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, QuadratureOptions opts = {}) {
  std::priority_queue<detail::GkEstimate> heap;
  auto first = detail::gauss_kronrod15(f, a, b);
  double value = first.value, error = first.error;
  heap.push(first);
  while (error > std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) {
    if (heap.size() >= opts.max_intervals)
      throw NumericError("adaptive quadrature did not converge");
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::gauss_kronrod15(f, worst.a, mid);
    const auto right = detail::gauss_kronrod15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  if (!std::isfinite(value)) throw NumericError("adaptive quadrature produced a non-finite value");
  // Re-sum to shed the drift of the incremental updates.
  double v = 0.0, e = 0.0;
  const std::size_t count = heap.size();
  while (!heap.empty()) {
    v += heap.top().value;
    e += heap.top().error;
    heap.pop();
  }
  return {v, e, count};
}

}  // namespace sfp
