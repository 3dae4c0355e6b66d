#pragma once

#include <cmath>
#include <vector>

#include "srcq/energy.hpp"

// Fibering map t -> E(tu), the Nehari residual E'(u)(u), and the projection
// u -> t* u onto N = {u != 0 : E'(u)(u) = 0}.  Under the hypothesis set the
// fibering derivative changes sign exactly once on (0, inf), so a bracketed
// root-finder is reliable; failure to bracket is reported as a distinct
// projection error rather than clamped.

namespace srcq {

struct FiberingResult {
  double t_star = 0.0;
  double residual_at_t = 0.0;  // nehari_residual at t* u
  double t_lo = 0.0;           // final bracket, residual > 0 at t_lo
  double t_hi = 0.0;           // residual < 0 at t_hi
  int evaluations = 0;
};

struct FiberingSample {
  double t;
  double energy;
  double dphi;  // d/dt E(tu)
};

// E'(u)(u) = ||u||_mu^2 - 1/2 D'(u)(u) + int K |u|^q.
inline double nehari_residual(const Field& u, const ModelParams& mp,
                              const RieszPlan& plan) {
  detail::require_plan(plan, mp, "nehari_residual");
  return q_mu_form(u, mp) - 0.5 * dd_derivative(plan, u, mp.nonlinearity, u) +
         k_integral(u, mp);
}

// Margin of the N-membership inequality (strict positivity of
// <I_alpha * F(u), f(u) u> - int K |u|^q on the manifold).
inline double membership_margin(const Field& u, const ModelParams& mp,
                                const RieszPlan& plan) {
  return 0.5 * dd_derivative(plan, u, mp.nonlinearity, u) - k_integral(u, mp);
}

// Finds t* > 0 with d/dt E(tu) = 0 by bracketing plus bisection/secant.
// Convergence is relative: |residual(t* u)| <= tol * ||t* u||_mu^2.
inline FiberingResult project(const Field& u, const ModelParams& mp,
                              const RieszPlan& plan, double tol = 1e-12,
                              double t_max = 1e6) {
  detail::require_plan(plan, mp, "project");
  if (l2_norm(u) == 0.0) throw usage_error("project: cannot project u = 0");
  FiberingResult res;
  double scale = 1.0;
  auto residual = [&](double t) {
    ++res.evaluations;
    Field tu = t * u;
    scale = std::max(q_mu_form(tu, mp), 1e-300);
    return scale - 0.5 * dd_derivative(plan, tu, mp.nonlinearity, tu) +
           k_integral(tu, mp);
  };

  // small-t side: the quadratic term dominates, residual > 0
  double a = 1.0, ra = residual(a);
  while (ra <= 0.0) {
    a *= 0.5;
    if (a < 1e-12) {
      throw projection_error("project: no positive residual at small t");
    }
    ra = residual(a);
  }
  // large-t side: D-dominance forces residual < 0 before t_max
  double b = a, rb = ra;
  while (rb >= 0.0) {
    b *= 2.0;
    if (b > t_max) {
      throw projection_error(
          "project: residual stays positive up to t_max (K-term dominance or "
          "t_max too small)");
    }
    rb = residual(b);
  }

  double t = 0.5 * (a + b), rt = residual(t);
  for (int iter = 0; iter < 80; ++iter) {
    if (std::abs(rt) <= tol * scale || b - a <= 1e-15 * b) break;
    if (rt > 0.0) {
      a = t;
      ra = rt;
    } else {
      b = t;
      rb = rt;
    }
    // secant through the bracket endpoints; every other step bisects so a
    // one-sided secant cannot stall on steep residuals
    double cand = a - ra * (b - a) / (rb - ra);
    if (iter % 2 == 1 || !(cand > a && cand < b)) cand = 0.5 * (a + b);
    t = cand;
    rt = residual(t);
  }
  res.t_star = t;
  res.residual_at_t = rt;
  res.t_lo = a;
  res.t_hi = b;
  return res;
}

inline std::vector<FiberingSample> fibering_scan(const Field& u,
                                                 const ModelParams& mp,
                                                 const RieszPlan& plan,
                                                 const std::vector<double>& t_grid) {
  detail::require_plan(plan, mp, "fibering_scan");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || (i > 0 && t_grid[i] <= t_grid[i - 1])) {
      throw usage_error("fibering_scan: t_grid must be positive increasing");
    }
  }
  std::vector<FiberingSample> table;
  table.reserve(t_grid.size());
  for (double t : t_grid) {
    Field tu = t * u;
    table.push_back({t, energy(tu, mp, plan).total,
                     nehari_residual(tu, mp, plan) / t});
  }
  return table;
}

// Pure-power test oracle for K = 0: t* = (||u||_mu^2 / (p D(u)))^{1/(2p-2)}.
inline double power_projection_oracle(const Field& u, const ModelParams& mp,
                                      const RieszPlan& plan) {
  const double p = mp.power_p;
  return std::pow(q_mu_form(u, mp) / (p * dd_value(plan, u, mp.nonlinearity)),
                  1.0 / (2.0 * p - 2.0));
}

}  // namespace srcq
