#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "srcq/constants.hpp"
#include "srcq/grid.hpp"
#include "srcq/nonlinearity.hpp"

// Problem data of the equation: dimension, mass, Coulomb coupling mu, the
// Riesz exponent alpha, the growth exponents (p, q), the potential split
// V = V_p + V_l, the weight K and the nonlinearity, together with executable
// checks of the standing hypotheses.

namespace srcq {

using SpatialFn = std::function<double(const double*, int)>;

struct PotentialSet {
  Field v_periodic;
  Field v_local;
  Field k_weight;
  Field coulomb;  // samples of 1/|x|, finite thanks to the node offset

  double essinf_v() const {
    double m = v_periodic[0] + v_local[0];
    for (std::size_t i = 0; i < v_periodic.size(); ++i) {
      m = std::min(m, v_periodic[i] + v_local[i]);
    }
    return m;
  }
  double essinf_v_periodic() const {
    double m = v_periodic[0];
    for (double v : v_periodic.values) m = std::min(m, v);
    return m;
  }
  double sup_v() const {
    double m = v_periodic[0] + v_local[0];
    for (std::size_t i = 0; i < v_periodic.size(); ++i) {
      m = std::max(m, std::abs(v_periodic[i] + v_local[i]));
    }
    return m;
  }
  Field total_v() const { return v_periodic + v_local; }
};

// Coulomb sampling rule: pointwise node values (default), or per-cell
// averages of 1/|x| near the origin for sensitivity studies.
enum class CoulombSampling { node, cell_average };

namespace detail {

// Cell average of 1/|z| over the cube of side h centered at x; tensor
// Gauss-Legendre, 8 points per axis.  The cell never contains the origin.
inline double cell_average_inv_radius(const double* x, int dim, double h) {
  static constexpr double gl_x[4] = {0.1834346424956498, 0.5255324099163290,
                                     0.7966664774136267, 0.9602898564975363};
  static constexpr double gl_w[4] = {0.3626837833783620, 0.3137066458778873,
                                     0.2223810344533745, 0.1012285362903763};
  double node[8], weight[8];
  for (int i = 0; i < 4; ++i) {
    node[3 - i] = -0.5 * gl_x[i];
    node[4 + i] = 0.5 * gl_x[i];
    weight[3 - i] = 0.5 * gl_w[i];
    weight[4 + i] = 0.5 * gl_w[i];
  }
  std::vector<int> it(dim, 0);
  double acc = 0.0;
  bool done = false;
  while (!done) {
    double w = 1.0, r2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double z = x[a] + h * node[it[a]];
      w *= weight[it[a]];
      r2 += z * z;
    }
    acc += w / std::sqrt(r2);
    int a = 0;
    for (; a < dim; ++a) {
      if (++it[a] < 8) break;
      it[a] = 0;
    }
    done = a == dim;
  }
  return acc;
}

}  // namespace detail

// Samples the potential triple on the grid.  K must be non-negative; V_p is
// checked for discrete Z^N-periodicity whenever the box length is an integer
// and the lattice resolves it.
inline PotentialSet build_potentials(const GridPtr& grid, const SpatialFn& v_p,
                                     const SpatialFn& v_l, const SpatialFn& k,
                                     CoulombSampling coulomb_rule = CoulombSampling::node) {
  PotentialSet pot{Field(grid), Field(grid), Field(grid), Field(grid)};
  const int dim = grid->dim();
  double x[8];
  for (std::size_t i = 0; i < grid->size(); ++i) {
    grid->coords(i, x);
    pot.v_periodic[i] = v_p(x, dim);
    pot.v_local[i] = v_l(x, dim);
    pot.k_weight[i] = k(x, dim);
    if (coulomb_rule == CoulombSampling::node || grid->radius(i) > 4.0 * grid->spacing()) {
      pot.coulomb[i] = 1.0 / grid->radius(i);
    } else {
      pot.coulomb[i] = detail::cell_average_inv_radius(x, dim, grid->spacing());
    }
    if (pot.k_weight[i] < 0.0) {
      throw constraint_error("build_potentials: K < 0 at a grid node, (K) violated");
    }
  }
  // Discrete periodicity audit of V_p: shift by one unit cell when possible.
  const double L = grid->box_length();
  const std::size_t M = grid->points_per_axis();
  if (L == std::floor(L) && M % static_cast<std::size_t>(L) == 0) {
    const std::size_t shift = M / static_cast<std::size_t>(L);
    std::size_t idx[8];
    for (std::size_t i = 0; i < grid->size(); ++i) {
      grid->unravel(i, idx);
      idx[0] = (idx[0] + shift) % M;
      const std::size_t j = grid->ravel(idx);
      if (std::abs(pot.v_periodic[i] - pot.v_periodic[j]) > 1e-10) {
        throw constraint_error("build_potentials: V_p is not Z^N-periodic on the grid");
      }
    }
  }
  return pot;
}

struct ModelParams {
  int dim;
  double mass;
  double mu;
  double alpha;
  double power_p;
  double power_q;
  NonlinearitySpec nonlinearity;
  PotentialSet potentials;
  GridPtr grid;
};

struct ValidationEntry {
  std::string condition;
  bool passed;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  bool mu_below_threshold = false;
  double mu_star_value = 0.0;

  bool all_passed() const {
    for (const auto& e : entries) {
      if (!e.passed) return false;
    }
    return true;
  }
  std::string summary() const {
    std::ostringstream os;
    for (const auto& e : entries) {
      os << (e.passed ? "pass" : "FAIL") << "  " << e.condition;
      if (!e.detail.empty()) os << "  [" << e.detail << "]";
      os << "\n";
    }
    return os.str();
  }
};

// Pure-number part of the hypothesis checks, usable before any model (or
// even grid) exists.
inline ValidationReport validate_numbers(int dim, double mass, double alpha,
                                         double p, double q) {
  ValidationReport rep;
  auto add = [&rep](const std::string& cond, bool ok, std::string detail = "") {
    rep.entries.push_back({cond, ok, std::move(detail)});
  };
  const double N = dim, a = alpha;
  auto num = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };
  add("(N): N >= 2", dim >= 2, "N = " + num(N));
  add("(N): (N-1)p - N < alpha", (N - 1.0) * p - N < a,
      "(N-1)p-N = " + num((N - 1.0) * p - N) + ", alpha = " + num(a));
  add("(N): alpha < N", a < N, "alpha = " + num(a));
  add("(N): 2 < q", 2.0 < q, "q = " + num(q));
  add("(N): q < 2p", q < 2.0 * p, "q = " + num(q) + ", 2p = " + num(2.0 * p));
  add("(N): q < 2N/(N-1)", q < 2.0 * N / (N - 1.0),
      "2N/(N-1) = " + num(2.0 * N / (N - 1.0)));
  add("(N): p > 2", p > 2.0, "p = " + num(p));
  add("m > 0", mass > 0.0, "m = " + num(mass));
  add("(alpha): 0 < alpha", a > 0.0, "Riesz kernel integrability");
  if (dim >= 2) {
    rep.mu_star_value = mu_star(dim);
  }
  return rep;
}

// Report-style check of every standing hypothesis; total on any input.
inline ValidationReport validate(const ModelParams& mp) {
  ValidationReport rep =
      validate_numbers(mp.dim, mp.mass, mp.alpha, mp.power_p, mp.power_q);
  auto add = [&rep](const std::string& cond, bool ok, std::string detail = "") {
    rep.entries.push_back({cond, ok, std::move(detail)});
  };
  auto num = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };
  bool k_ok = true;
  for (double v : mp.potentials.k_weight.values) k_ok = k_ok && v >= 0.0;
  add("(K): K >= 0", k_ok);
  add("(V2): essinf V > m", mp.potentials.essinf_v() > mp.mass,
      "essinf V = " + num(mp.potentials.essinf_v()));
  if (mp.dim >= 2) {
    rep.mu_star_value = mu_star(mp.dim);
    rep.mu_below_threshold = mp.mu < rep.mu_star_value;
  }
  return rep;
}

inline void require_valid(const ModelParams& mp) {
  auto rep = validate(mp);
  if (!rep.all_passed()) {
    std::string msg = "model hypotheses violated:\n" + rep.summary();
    throw constraint_error(msg);
  }
}

// (a1): V_l(x) < mu/|x| at every node; (a2): the reverse strict inequality.
// Undefined for mu = 0.
inline bool check_a1(const ModelParams& mp) {
  if (mp.mu == 0.0) throw usage_error("check_a1: condition undefined for mu = 0");
  const auto& pot = mp.potentials;
  for (std::size_t i = 0; i < pot.v_local.size(); ++i) {
    if (!(pot.v_local[i] < mp.mu * pot.coulomb[i])) return false;
  }
  return true;
}

inline bool check_a2(const ModelParams& mp) {
  if (mp.mu == 0.0) throw usage_error("check_a2: condition undefined for mu = 0");
  const auto& pot = mp.potentials;
  for (std::size_t i = 0; i < pot.v_local.size(); ++i) {
    if (!(pot.v_local[i] > mp.mu * pot.coulomb[i])) return false;
  }
  return true;
}

// V_l decay audit on the outermost ring of the box; asymptotic membership in
// L^N(R^N) is not machine-checkable, this is the documented surrogate.
inline bool check_vl_boundary_decay(const ModelParams& mp, double eps_bdry) {
  const GridPtr& g = mp.grid;
  const std::size_t M = g->points_per_axis();
  std::size_t idx[8];
  for (std::size_t i = 0; i < g->size(); ++i) {
    g->unravel(i, idx);
    bool on_ring = false;
    for (int a = 0; a < g->dim(); ++a) {
      if (idx[a] == 0 || idx[a] == M - 1) on_ring = true;
    }
    if (on_ring && std::abs(mp.potentials.v_local[i]) >= eps_bdry) return false;
  }
  return true;
}

// Convenience builders for common test configurations.
inline SpatialFn constant_fn(double c) {
  return [c](const double*, int) { return c; };
}
inline SpatialFn zero_fn() { return constant_fn(0.0); }

}  // namespace srcq
