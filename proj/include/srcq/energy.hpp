#pragma once

#include <cmath>
#include <vector>

#include "srcq/constants.hpp"
#include "srcq/model.hpp"
#include "srcq/riesz.hpp"
#include "srcq/spectral.hpp"

// Quadratic forms Q and Q_mu, the energy
//   E(u) = 1/2 Q_mu(u) - 1/2 D(u) + (1/q) int K |u|^q,
// its periodic comparison functional, first variations, and the sandwich
// bounds tying Q to the standard seminorm-plus-mass norm.  All inner products
// reuse the spectral and quadrature primitives, so finite-difference checks
// of the gradient see one consistent discretization.

namespace srcq {

namespace detail {

// sign(u) |u|^{q-1}, continuous at 0 for q > 2.
inline double signed_power(double u, double q) {
  if (u == 0.0) return 0.0;
  const double s = u < 0.0 ? -1.0 : 1.0;
  return s * std::pow(std::abs(u), q - 1.0);
}

inline void require_plan(const RieszPlan& plan, const ModelParams& mp,
                         const char* where) {
  if (!plan.grid()->compatible(*mp.grid) || plan.alpha() != mp.alpha) {
    throw usage_error(std::string(where) + ": Riesz plan does not match the model");
  }
}

}  // namespace detail

inline double coulomb_integral(const Field& u, const ModelParams& mp) {
  require_same_grid(u, mp.potentials.coulomb, "coulomb_integral");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    acc += u[i] * u[i] * mp.potentials.coulomb[i];
  }
  return acc * u.grid->cell_volume();
}

inline double k_integral(const Field& u, const ModelParams& mp) {
  require_same_grid(u, mp.potentials.k_weight, "k_integral");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    acc += mp.potentials.k_weight[i] * std::pow(std::abs(u[i]), mp.power_q);
  }
  return acc * u.grid->cell_volume();
}

// Q(u) = <sqrt(-Lap + m^2) u, u> + <(V - m) u, u>.
inline double q_form(const Field& u, const ModelParams& mp) {
  require_same_grid(u, mp.potentials.v_periodic, "q_form");
  double pot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = mp.potentials.v_periodic[i] + mp.potentials.v_local[i];
    pot += (v - mp.mass) * u[i] * u[i];
  }
  return kinetic_quadratic(u, mp.mass) + pot * u.grid->cell_volume();
}

inline double q_mu_form(const Field& u, const ModelParams& mp) {
  return q_form(u, mp) - mp.mu * coulomb_integral(u, mp);
}

// <u, v>_mu, same primitives as q_mu_form.
inline double mu_inner(const Field& u, const Field& v, const ModelParams& mp) {
  require_same_grid(u, v, "mu_inner");
  double pot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double w = mp.potentials.v_periodic[i] + mp.potentials.v_local[i] -
                     mp.mass - mp.mu * mp.potentials.coulomb[i];
    pot += w * u[i] * v[i];
  }
  return l2_inner(apply_sqrt_lap(u, mp.mass), v) + pot * u.grid->cell_volume();
}

struct SandwichReport {
  double standard_norm_sq = 0.0;  // [u]^2 + |u|_2^2
  double q_value = 0.0;
  double q_mu_value = 0.0;
  double lower_constant = 0.0;     // min{C(N,1/2)/2, essinf V - m}
  double upper_constant = 0.0;     // max{C(N,1/2)/2, |V|_inf}
  double mu_lower_constant = 0.0;  // min{C(N,1/2)/2 - mu/C_hardy, essinf V - m}
  double lower_margin = 0.0;
  double upper_margin = 0.0;
  double mu_lower_margin = 0.0;
  bool lower_holds = false;
  bool upper_holds = false;
  bool mu_lower_holds = false;
  bool mu_coercive = false;  // mu_lower_constant > 0
};

inline SandwichReport sandwich_check(const Field& u, const ModelParams& mp) {
  SandwichReport rep;
  const double c_half = 0.5 * c_n_half(mp.dim);
  const double hardy = hardy_sharp(mp.dim);
  const double l2sq = l2_inner(u, u);
  rep.standard_norm_sq = gagliardo_sq(u) + l2sq;
  rep.q_value = q_form(u, mp);
  rep.q_mu_value = q_mu_form(u, mp);
  rep.lower_constant = std::min(c_half, mp.potentials.essinf_v() - mp.mass);
  rep.upper_constant = std::max(c_half, mp.potentials.sup_v());
  rep.mu_lower_constant =
      std::min(c_half - mp.mu / hardy, mp.potentials.essinf_v() - mp.mass);
  rep.lower_margin = rep.q_value - rep.lower_constant * rep.standard_norm_sq;
  rep.upper_margin = rep.upper_constant * rep.standard_norm_sq - rep.q_value;
  rep.mu_lower_margin = rep.q_mu_value - rep.mu_lower_constant * rep.standard_norm_sq;
  rep.lower_holds = rep.lower_margin >= 0.0;
  rep.upper_holds = rep.upper_margin >= 0.0;
  rep.mu_lower_holds = rep.mu_lower_margin >= 0.0;
  rep.mu_coercive = rep.mu_lower_constant > 0.0;
  return rep;
}

struct EnergyBreakdown {
  double kinetic_potential = 0.0;  // 1/2 Q(u)
  double coulomb = 0.0;            // -(mu/2) int u^2 / |x|
  double hartree = 0.0;            // -1/2 D(u)
  double k_term = 0.0;             // (1/q) int K |u|^q
  double total = 0.0;
};

inline EnergyBreakdown energy(const Field& u, const ModelParams& mp,
                              const RieszPlan& plan) {
  detail::require_plan(plan, mp, "energy");
  EnergyBreakdown b;
  b.kinetic_potential = 0.5 * q_form(u, mp);
  b.coulomb = -0.5 * mp.mu * coulomb_integral(u, mp);
  b.hartree = -0.5 * dd_value(plan, u, mp.nonlinearity);
  b.k_term = k_integral(u, mp) / mp.power_q;
  b.total = b.kinetic_potential + b.coulomb + b.hartree + b.k_term;
  return b;
}

// Periodic comparison functional: V_l and Coulomb dropped.
inline EnergyBreakdown energy_per(const Field& u, const ModelParams& mp,
                                  const RieszPlan& plan) {
  detail::require_plan(plan, mp, "energy_per");
  EnergyBreakdown b;
  double pot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    pot += (mp.potentials.v_periodic[i] - mp.mass) * u[i] * u[i];
  }
  b.kinetic_potential =
      0.5 * (kinetic_quadratic(u, mp.mass) + pot * u.grid->cell_volume());
  b.coulomb = 0.0;
  b.hartree = -0.5 * dd_value(plan, u, mp.nonlinearity);
  b.k_term = k_integral(u, mp) / mp.power_q;
  b.total = b.kinetic_potential + b.hartree + b.k_term;
  return b;
}

// L^2 representative of E'(u):
//   g = (sqrt(-Lap + m^2) - m + V - mu/|x|) u - (I_alpha * F(u)) f(u) + K |u|^{q-2} u.
inline Field gradient_field(const Field& u, const ModelParams& mp,
                            const RieszPlan& plan) {
  detail::require_plan(plan, mp, "gradient_field");
  Field g = apply_sqrt_lap(u, mp.mass);
  Field conv = plan.convolve(mp.nonlinearity.apply_F(u));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = mp.potentials.v_periodic[i] + mp.potentials.v_local[i] -
                     mp.mass - mp.mu * mp.potentials.coulomb[i];
    g[i] += w * u[i] - conv[i] * mp.nonlinearity.f(i, u[i]) +
            mp.potentials.k_weight[i] * detail::signed_power(u[i], mp.power_q);
  }
  return g;
}

// E'(u)(phi) assembled term by term, not via gradient_field.
inline double first_variation(const Field& u, const ModelParams& mp,
                              const RieszPlan& plan, const Field& phi) {
  detail::require_plan(plan, mp, "first_variation");
  require_same_grid(u, phi, "first_variation");
  double k_part = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    k_part += mp.potentials.k_weight[i] * detail::signed_power(u[i], mp.power_q) * phi[i];
  }
  k_part *= u.grid->cell_volume();
  return mu_inner(u, phi, mp) -
         0.5 * dd_derivative(plan, u, mp.nonlinearity, phi) + k_part;
}

}  // namespace srcq
