#pragma once

#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "srcq/errors.hpp"

namespace srcq {

// Adaptive 1D quadrature built on the 15-point Kronrod extension of the
// 7-point Gauss rule.  Panels are split by largest error estimate first.

namespace detail {

// Nodes/weights on [-1, 1].  Gauss weights are nonzero on the odd Kronrod
// nodes only.
inline constexpr double kKronrodNodes[15] = {
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

inline constexpr double kKronrodWeights[15] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

inline constexpr double kGaussWeights[7] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct Panel {
  double a, b;
  double integral;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename F>
Panel gk15(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = 0.0;
  double gauss = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double v = f(mid + half * kKronrodNodes[i]);
    kronrod += kKronrodWeights[i] * v;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * v;
  }
  kronrod *= half;
  gauss *= half;
  const double diff = std::abs(kronrod - gauss);
  // QUADPACK-style error sharpening with a round-off floor: the estimate
  // never drops below what double precision can resolve on this panel.
  const double err = std::min(diff, std::pow(200.0 * diff, 1.5));
  const double floor = 50.0 * 2.22e-16 * std::abs(kronrod);
  return Panel{a, b, kronrod, std::max(err, floor)};
}

}  // namespace detail

struct QuadratureResult {
  double value;
  double error_estimate;
  int panels;
};

// Integrates f over [a, b] to absolute tolerance abs_tol or relative
// tolerance rel_tol, whichever is met first.  Throws numeric_error carrying
// the achieved error estimate when the panel budget is exhausted.
template <typename F>
QuadratureResult integrate_adaptive(const F& f, double a, double b,
                                    double abs_tol = 1e-12,
                                    double rel_tol = 1e-12,
                                    int max_panels = 2000) {
  std::priority_queue<detail::Panel> panels;
  panels.push(detail::gk15(f, a, b));
  double total = panels.top().integral;
  double total_err = panels.top().error;
  int count = 1;
  while (total_err > abs_tol && total_err > rel_tol * std::abs(total)) {
    if (count >= max_panels) {
      throw numeric_error("adaptive quadrature: panel budget exhausted", total_err);
    }
    detail::Panel worst = panels.top();
    panels.pop();
    total -= worst.integral;
    total_err -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    total += left.integral + right.integral;
    total_err += left.error + right.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  return QuadratureResult{total, total_err, count};
}

}  // namespace srcq
