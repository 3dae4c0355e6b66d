#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "srcq/nehari.hpp"

// Ground-state computation: preconditioned gradient descent restricted to the
// Nehari manifold.  Each iteration descends along the preconditioned
// gradient, re-projects onto the manifold, and backtracks until the energy
// decreases.  The ground state is a free critical point, so the unprojected
// gradient norm is the convergence measure.

namespace srcq {

enum class StepRule { fixed, backtracking };

struct SolveOptions {
  int max_iters = 2000;
  double grad_tol = 1e-8;
  StepRule step_rule = StepRule::backtracking;
  double precondition_shift = 0.0;  // <= 0: use essinf V - m
  unsigned seed = 0;
  int restarts = 1;
  double step_size = 1.0;  // initial (backtracking) or constant (fixed) step
  double projection_tol = 1e-12;
};

struct IterationRecord {
  int iter;
  double energy;
  double grad_norm;
  double nehari_residual;
  double t_star;
};

struct GroundStateResult {
  Field field;
  double energy = 0.0;
  EnergyBreakdown breakdown;
  double nehari_residual = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  std::vector<double> restart_energies;
  std::vector<IterationRecord> log;
};

struct ConcentrationResult {
  std::vector<long long> z;
  double mass = 0.0;
};

// Lattice translation z in Z^N maximizing the discrete ball mass
// int_{B(z, radius)} v^2, with periodic min-image distances.
inline ConcentrationResult concentration_locator(const Field& v, double radius) {
  if (!(radius > 0.0)) throw usage_error("concentration_locator: radius must be positive");
  const GridPtr& g = v.grid;
  const int dim = g->dim();
  const double L = g->box_length();
  const long long half = static_cast<long long>(std::floor(0.5 * L));
  ConcentrationResult best;
  best.z.assign(dim, 0);
  best.mass = -1.0;
  std::vector<long long> z(dim, -half);
  std::vector<double> x(8);
  bool done = false;
  while (!done) {
    double mass = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      g->coords(i, x.data());
      double r2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        double d = std::abs(x[a] - static_cast<double>(z[a]));
        d = std::min(d, L - d);
        r2 += d * d;
      }
      if (r2 <= radius * radius) mass += v[i] * v[i];
    }
    mass *= g->cell_volume();
    if (mass > best.mass) {
      best.mass = mass;
      best.z.assign(z.begin(), z.end());
    }
    int a = 0;
    for (; a < dim; ++a) {
      if (++z[a] < half) break;
      z[a] = -half;
    }
    done = a == dim;
  }
  return best;
}

// Max deviation of u under the hyperoctahedral symmetry group of the grid
// (axis reflections and permutations composed with lattice translations),
// relative to max |u|.  The reflection center is detected per axis: either
// the peak node or an adjacent cell corner, whichever mirrors the field
// best.  On a translation-invariant model the minimizer pins to a node, so
// quotienting by translations is what makes the defect meaningful.
inline double symmetry_defect(const Field& u) {
  const GridPtr& g = u.grid;
  const int dim = g->dim();
  const long long M = static_cast<long long>(g->points_per_axis());
  double umax = 0.0;
  std::size_t pk = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (std::abs(u[i]) > umax) {
      umax = std::abs(u[i]);
      pk = i;
    }
  }
  if (umax == 0.0) return 0.0;
  std::size_t pidx[8];
  g->unravel(pk, pidx);

  // choose the reflection center on each axis: s even mirrors about node
  // s/2, s odd about the corner between nodes (s-1)/2 and (s+1)/2
  long long s[8];
  bool node_type[8];
  std::size_t idx[8], tidx[8];
  for (int a = 0; a < dim; ++a) {
    double best = std::numeric_limits<double>::infinity();
    for (long long ds : {0ll, 1ll, -1ll}) {
      const long long sa = 2ll * static_cast<long long>(pidx[a]) + ds;
      double worst = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        g->unravel(i, idx);
        for (int b = 0; b < dim; ++b) tidx[b] = idx[b];
        tidx[a] = static_cast<std::size_t>(
            (((sa - static_cast<long long>(idx[a])) % M) + M) % M);
        worst = std::max(worst, std::abs(u[g->ravel(tidx)] - u[i]));
      }
      if (worst < best) {
        best = worst;
        s[a] = sa;
      }
    }
    node_type[a] = (((s[a] % 2) + 2) % 2) == 0;
  }

  // translate the center to a canonical spot: node M/2, or the corner
  // between nodes M/2 - 1 and M/2
  Field v(g);
  long long shift[8];
  for (int a = 0; a < dim; ++a) {
    const long long c = node_type[a] ? s[a] / 2 : (s[a] + 1) / 2;
    shift[a] = M / 2 - c;
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    g->unravel(i, idx);
    for (int a = 0; a < dim; ++a) {
      idx[a] = static_cast<std::size_t>(
          ((static_cast<long long>(idx[a]) + shift[a]) % M + M) % M);
    }
    v[g->ravel(idx)] = u[i];
  }

  std::vector<int> perm(dim);
  std::iota(perm.begin(), perm.end(), 0);
  double defect = 0.0;
  do {
    for (int flips = 0; flips < (1 << dim); ++flips) {
      double worst = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        g->unravel(i, idx);
        for (int a = 0; a < dim; ++a) {
          long long j = static_cast<long long>(idx[perm[a]]);
          if ((flips >> a) & 1) j = node_type[a] ? (M - j) % M : M - 1 - j;
          tidx[a] = static_cast<std::size_t>(j);
        }
        worst = std::max(worst, std::abs(v[g->ravel(tidx)] - v[i]));
      }
      defect = std::max(defect, worst);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return defect / umax;
}

// Initialization presets.  The Gaussian is centered on the node nearest the
// box center (the offset grid has no node at the origin); a bump centered on
// the cell corner instead sits on a saddle of the discrete translation
// landscape and restarts would then disagree on the pinned position.
inline Field gaussian_init(const GridPtr& grid, double width = 0.0, double amp = 1.0) {
  if (width <= 0.0) width = grid->box_length() / 8.0;
  const double c = 0.5 * grid->spacing();
  Field u(grid);
  double x[8];
  for (std::size_t i = 0; i < u.size(); ++i) {
    grid->coords(i, x);
    double r2 = 0.0;
    for (int a = 0; a < grid->dim(); ++a) r2 += (x[a] - c) * (x[a] - c);
    u[i] = amp * std::exp(-r2 / (width * width));
  }
  return u;
}

namespace detail {

inline Field apply_preconditioner(const Field& g, double m, double sigma) {
  SpectralField gh = forward_transform(g);
  for (std::size_t k = 0; k < gh.coefficients.size(); ++k) {
    const double xi = g.grid->freq_norm(k);
    gh.coefficients[k] /= std::sqrt(xi * xi + m * m) + sigma;
  }
  return inverse_transform(gh);
}

inline bool translation_invariant(const ModelParams& mp) {
  if (mp.mu != 0.0) return false;
  for (double v : mp.potentials.v_local.values) {
    if (v != 0.0) return false;
  }
  const double v0 = mp.potentials.v_periodic[0];
  for (double v : mp.potentials.v_periodic.values) {
    if (v != v0) return false;
  }
  const double k0 = mp.potentials.k_weight[0];
  for (double v : mp.potentials.k_weight.values) {
    if (v != k0) return false;
  }
  return true;
}

// Circular shift by whole grid cells.
inline Field circular_shift(const Field& u, const std::vector<long long>& cells) {
  const GridPtr& g = u.grid;
  const std::size_t M = g->points_per_axis();
  Field out(g);
  std::size_t idx[8];
  for (std::size_t i = 0; i < u.size(); ++i) {
    g->unravel(i, idx);
    for (int a = 0; a < g->dim(); ++a) {
      const long long shifted =
          (static_cast<long long>(idx[a]) + cells[a] % static_cast<long long>(M) +
           static_cast<long long>(M)) %
          static_cast<long long>(M);
      idx[a] = static_cast<std::size_t>(shifted);
    }
    out[g->ravel(idx)] = u[i];
  }
  return out;
}

inline GroundStateResult solve_single(const Field& init, const ModelParams& mp,
                                      const RieszPlan& plan, const SolveOptions& opts) {
  const double sigma = opts.precondition_shift > 0.0
                           ? opts.precondition_shift
                           : mp.potentials.essinf_v() - mp.mass;
  if (!(sigma > 0.0)) {
    throw usage_error("ground_state: preconditioner shift must be positive ((V2) gives one)");
  }
  const GridPtr& grid = mp.grid;
  const double L = grid->box_length();
  const bool recenter_ok = translation_invariant(mp) && L == std::floor(L) &&
                           grid->points_per_axis() % static_cast<std::size_t>(L) == 0;

  GroundStateResult res;
  auto proj = project(init, mp, plan, opts.projection_tol);
  Field u = proj.t_star * init;
  EnergyBreakdown cur = energy(u, mp, plan);
  double e = cur.total;
  // energy comparisons are meaningful only above the cancellation noise of
  // the breakdown terms
  auto noise_floor = [](const EnergyBreakdown& b) {
    return 32.0 * std::numeric_limits<double>::epsilon() *
           (std::abs(b.kinetic_potential) + std::abs(b.coulomb) +
            std::abs(b.hartree) + std::abs(b.k_term));
  };
  double step = opts.step_size;
  double t_last = proj.t_star;
  // Two phases.  The backtracking phase is monotone: a step is accepted only
  // if the energy decreases beyond the noise floor.  Once no such step
  // exists the energy has converged to machine precision and the solve
  // switches to the polish phase: a constant preconditioned step accepted
  // unconditionally, under which the gradient norm contracts linearly to
  // the round-off floor.  step_rule fixed starts directly in the polish
  // phase.
  bool polish = opts.step_rule == StepRule::fixed;
  int polish_iters = 0;
  int polish_last_improve = 0;
  double polish_best = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    Field g = gradient_field(u, mp, plan);
    const double gn = l2_norm(g);
    res.log.push_back({iter, e, gn, nehari_residual(u, mp, plan), t_last});
    res.iterations = iter;
    if (gn <= opts.grad_tol) break;
    if (!std::isfinite(e) || !std::isfinite(gn)) {
      throw numeric_error("ground_state: iterate left the floating point range", gn);
    }

    Field d = apply_preconditioner(g, mp.mass, sigma);
    bool accepted = false;
    if (!polish) {
      const double flat_slack = noise_floor(cur);
      double try_step = step;
      for (int back = 0; back < 60; ++back) {
        Field trial = u;
        axpy(-try_step, d, trial);
        if (l2_norm(trial) > 0.0) {
          auto p = project(trial, mp, plan, opts.projection_tol);
          Field w = p.t_star * trial;
          const EnergyBreakdown bw = energy(w, mp, plan);
          if (bw.total < e - flat_slack) {
            u = w;
            cur = bw;
            e = bw.total;
            t_last = p.t_star;
            step = std::min(try_step * 1.5, 1e3);
            accepted = true;
            break;
          }
        }
        try_step *= 0.5;
        if (try_step < 1e-14) break;
      }
      if (!accepted) {
        polish = true;
        step = opts.step_size;
        polish_best = gn;
      }
    }
    if (polish && !accepted) {
      Field trial = u;
      axpy(-step, d, trial);
      auto p = project(trial, mp, plan, opts.projection_tol);
      u = p.t_star * trial;
      cur = energy(u, mp, plan);
      e = cur.total;
      t_last = p.t_star;
      ++polish_iters;
      if (gn < 0.5 * polish_best) {
        polish_best = gn;
        polish_last_improve = polish_iters;
      }
      if (polish_iters - polish_last_improve > 150) {
        throw stagnation_error(
            "ground_state: gradient norm stopped contracting in the polish phase",
            e, gn);
      }
    }
    if (recenter_ok && (iter + 1) % 50 == 0) {
      auto loc = concentration_locator(u, 1.0 + std::sqrt(grid->dim()));
      bool at_origin = true;
      for (long long zc : loc.z) at_origin = at_origin && zc == 0;
      if (!at_origin) {
        const long long cells_per_unit =
            static_cast<long long>(grid->points_per_axis()) /
            static_cast<long long>(L);
        std::vector<long long> cells(loc.z.size());
        for (std::size_t a = 0; a < cells.size(); ++a) {
          cells[a] = -loc.z[a] * cells_per_unit;
        }
        u = circular_shift(u, cells);
      }
    }
  }

  res.field = u;
  res.energy = e;
  res.breakdown = energy(u, mp, plan);
  res.nehari_residual = nehari_residual(u, mp, plan);
  res.grad_norm = l2_norm(gradient_field(u, mp, plan));
  return res;
}

}  // namespace detail

inline GroundStateResult ground_state(const ModelParams& mp, const RieszPlan& plan,
                                      const SolveOptions& opts,
                                      const Field* init = nullptr) {
  if (!(opts.grad_tol > 0.0)) throw usage_error("ground_state: grad_tol must be positive");
  detail::require_plan(plan, mp, "ground_state");
  Field base = init ? *init : gaussian_init(mp.grid);
  GroundStateResult best;
  bool have = false;
  std::vector<double> energies;
  std::mt19937_64 rng(opts.seed);
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    Field start = base;
    if (r > 0) {
      // band-limited random perturbation on top of the base profile; the
      // phases are random on every axis so no reflection symmetry of the
      // base profile survives into the restart
      std::normal_distribution<double> amp(0.0, 0.2);
      std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
      const double L = mp.grid->box_length();
      const int dim = mp.grid->dim();
      for (int mode = 0; mode < 4; ++mode) {
        const double a = amp(rng);
        double k[8], ph[8];
        for (int ax = 0; ax < dim; ++ax) {
          k[ax] = 2.0 * kPi / L * (1 + (mode + ax) % 2);
          ph[ax] = phase(rng);
        }
        double x[8];
        for (std::size_t i = 0; i < start.size(); ++i) {
          mp.grid->coords(i, x);
          const double r2 = mp.grid->radius(i);
          double wave = a * std::exp(-r2 * r2 / (L * L / 16.0));
          for (int ax = 0; ax < dim; ++ax) wave *= std::cos(k[ax] * x[ax] + ph[ax]);
          start[i] += wave;
        }
      }
    }
    GroundStateResult one = detail::solve_single(start, mp, plan, opts);
    energies.push_back(one.energy);
    if (!have || one.energy < best.energy) {
      best = std::move(one);
      have = true;
    }
  }
  best.restart_energies = energies;
  return best;
}

struct ContinuationRow {
  double mu;
  double energy;
};

struct ContinuationResult {
  std::vector<ContinuationRow> rows;
  double c0 = 0.0;  // mu = 0 level
};

// Warm-started solves along a decreasing mu schedule, then a mu = 0 solve.
// Asserts c_n <= c0 along the way.
inline ContinuationResult continuation_mu(const ModelParams& base,
                                          const RieszPlan& plan,
                                          const std::vector<double>& schedule,
                                          const SolveOptions& opts) {
  const double ms = mu_star(base.dim);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0 && schedule[i] < ms)) {
      throw usage_error("continuation_mu: schedule must lie in (0, mu*)");
    }
    if (i > 0 && schedule[i] >= schedule[i - 1]) {
      throw usage_error("continuation_mu: schedule must be strictly decreasing");
    }
  }
  for (double v : base.potentials.v_local.values) {
    if (v != 0.0) throw usage_error("continuation_mu: requires V_l = 0");
  }
  ContinuationResult out;
  Field warm = gaussian_init(base.grid);
  std::vector<double> mus = schedule;
  mus.push_back(0.0);
  double c0 = 0.0;
  for (double mu : mus) {
    ModelParams mp = base;
    mp.mu = mu;
    GroundStateResult r = ground_state(mp, plan, opts, &warm);
    warm = r.field;
    if (mu == 0.0) {
      c0 = r.energy;
    } else {
      out.rows.push_back({mu, r.energy});
    }
  }
  out.c0 = c0;
  const double slack = 10.0 * opts.grad_tol;
  for (const auto& row : out.rows) {
    if (row.energy > c0 + slack) {
      throw numeric_error("continuation_mu: c_n exceeds the mu = 0 level",
                          row.energy - c0);
    }
  }
  return out;
}

struct ProbeRow {
  double shift_norm;
  double sup_energy;  // fibering maximum of the shifted profile
};

// Projects circular translates of a profile and records their fibering
// maxima.  For mu < 0 under (a2) the values decrease with |z|, the numerical
// signature that the infimum is not attained.
inline std::vector<ProbeRow> nonexistence_probe(
    const ModelParams& mp, const RieszPlan& plan, const Field& base_profile,
    const std::vector<std::vector<long long>>& shifts, double tol = 1e-12) {
  detail::require_plan(plan, mp, "nonexistence_probe");
  const GridPtr& grid = mp.grid;
  const double L = grid->box_length();
  if (L != std::floor(L) || grid->points_per_axis() % static_cast<std::size_t>(L) != 0) {
    throw usage_error("nonexistence_probe: needs an integer box resolved by the grid");
  }
  const long long cells_per_unit = static_cast<long long>(grid->points_per_axis()) /
                                   static_cast<long long>(L);
  std::vector<ProbeRow> table;
  for (const auto& z : shifts) {
    if (static_cast<int>(z.size()) != grid->dim()) {
      throw usage_error("nonexistence_probe: shift dimension mismatch");
    }
    double norm2 = 0.0;
    for (long long zc : z) {
      if (std::abs(zc) > static_cast<long long>(L) / 2 - 1) {
        throw usage_error("nonexistence_probe: shift does not fit in the box");
      }
      norm2 += static_cast<double>(zc * zc);
    }
    std::vector<long long> cells(z.size());
    for (std::size_t a = 0; a < z.size(); ++a) cells[a] = z[a] * cells_per_unit;
    Field shifted = detail::circular_shift(base_profile, cells);
    auto p = project(shifted, mp, plan, tol);
    table.push_back({std::sqrt(norm2), energy(p.t_star * shifted, mp, plan).total});
  }
  return table;
}

}  // namespace srcq
