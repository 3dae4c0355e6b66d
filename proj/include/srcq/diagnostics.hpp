#pragma once

#include <cmath>
#include <vector>

#include "srcq/solver.hpp"

// Desk-scale checks of the splitting lemmas: place synthetic profiles a
// lattice separation apart and measure how fast the nonlocal cross terms
// die off.  Profiles are constructed, not solver outputs; the lemmas speak
// about arbitrary bounded sequences.

namespace srcq {

struct SplittingReport {
  std::vector<double> separations;
  std::vector<double> cross_terms;
  std::vector<double> decay_ratios;  // successive ratios, first entry 1
};

namespace detail {

// Radius of the ball (about the profile's own peak) holding 99% of the L2
// mass; used for the overlap precondition.
inline double effective_radius(const Field& u) {
  const GridPtr& g = u.grid;
  std::size_t pk = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (std::abs(u[i]) > std::abs(u[pk])) pk = i;
  }
  double cx[8], x[8];
  g->coords(pk, cx);
  const double L = g->box_length();
  std::vector<std::pair<double, double>> samples;
  samples.reserve(u.size());
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    g->coords(i, x);
    double r2 = 0.0;
    for (int a = 0; a < g->dim(); ++a) {
      double d = std::abs(x[a] - cx[a]);
      d = std::min(d, L - d);
      r2 += d * d;
    }
    samples.push_back({r2, u[i] * u[i]});
    total += u[i] * u[i];
  }
  if (total == 0.0) return 0.0;
  std::sort(samples.begin(), samples.end());
  double acc = 0.0;
  for (const auto& s : samples) {
    acc += s.second;
    if (acc >= 0.99 * total) return std::sqrt(s.first);
  }
  return std::sqrt(samples.back().first);
}

// Placement directions for the shifted parts: +-e1, +-e2, ... so all
// pairwise distances are at least the separation.
inline std::vector<long long> part_direction(int k, int dim) {
  std::vector<long long> d(dim, 0);
  const int axis = ((k - 1) / 2) % dim;
  d[axis] = (k % 2 == 1) ? 1 : -1;
  return d;
}

struct Placement {
  Field sum;
  std::vector<Field> placed;
};

inline Placement place_parts(const std::vector<Field>& parts, double separation) {
  const GridPtr& g = parts.front().grid;
  const double L = g->box_length();
  if (!(separation > 0.0) || separation != std::floor(separation)) {
    throw usage_error("splitting: separations must be positive integers (Z^N shifts)");
  }
  if (L != std::floor(L) || g->points_per_axis() % static_cast<std::size_t>(L) != 0) {
    throw usage_error("splitting: the grid must resolve the unit lattice");
  }
  const long long cells_per_unit =
      static_cast<long long>(g->points_per_axis()) / static_cast<long long>(L);
  Placement out{Field(g), {}};
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (!parts[k].grid || !parts[k].grid->compatible(*g)) {
      throw usage_error("splitting: parts live on different grids");
    }
    Field placed = parts[k];
    if (k > 0) {
      const double reach = separation + effective_radius(parts[k]);
      if (reach > 0.5 * L) {
        throw usage_error("splitting: parts overlap through the box (separation too large)");
      }
      auto dir = part_direction(static_cast<int>(k), g->dim());
      std::vector<long long> cells(dir.size());
      for (std::size_t a = 0; a < dir.size(); ++a) {
        cells[a] = dir[a] * static_cast<long long>(separation) * cells_per_unit;
      }
      placed = circular_shift(parts[k], cells);
    }
    out.sum = out.sum + placed;
    out.placed.push_back(std::move(placed));
  }
  return out;
}

inline void finish_report(SplittingReport& rep, bool assert_decay) {
  rep.decay_ratios.assign(rep.cross_terms.size(), 1.0);
  for (std::size_t i = 1; i < rep.cross_terms.size(); ++i) {
    rep.decay_ratios[i] =
        rep.cross_terms[i] / std::max(rep.cross_terms[i - 1], 1e-300);
    if (assert_decay && !(rep.cross_terms[i] < rep.cross_terms[i - 1])) {
      throw numeric_error("splitting: cross term failed to decrease under separation",
                          rep.cross_terms[i] - rep.cross_terms[i - 1]);
    }
  }
}

inline void check_splitting_args(const std::vector<Field>& parts,
                                 const std::vector<double>& separations) {
  if (parts.empty()) throw usage_error("splitting: needs at least one part");
  for (std::size_t i = 1; i < separations.size(); ++i) {
    if (!(separations[i] > separations[i - 1])) {
      throw usage_error("splitting: separations must be strictly increasing");
    }
  }
}

}  // namespace detail

// |D(sum of placed parts) - sum D(part)| per separation; the discrete
// Brezis-Lieb statement is that this vanishes as the parts separate.
inline SplittingReport brezis_lieb_d(const std::vector<Field>& parts,
                                     const std::vector<double>& separations,
                                     const RieszPlan& plan,
                                     const NonlinearitySpec& nl) {
  detail::check_splitting_args(parts, separations);
  double sum_d = 0.0;
  for (const auto& p : parts) sum_d += dd_value(plan, p, nl);
  SplittingReport rep;
  for (double r : separations) {
    auto placed = detail::place_parts(parts, r);
    rep.separations.push_back(r);
    rep.cross_terms.push_back(std::abs(dd_value(plan, placed.sum, nl) - sum_d));
  }
  detail::finish_report(rep, parts.size() > 1);
  return rep;
}

// |E(sum) - E(part0) - sum E_per(shifted parts)| per separation, the
// energy-level analogue with the centered part playing the weak limit.
inline SplittingReport energy_split(const std::vector<Field>& parts,
                                    const std::vector<double>& separations,
                                    const ModelParams& mp, const RieszPlan& plan) {
  detail::check_splitting_args(parts, separations);
  detail::require_plan(plan, mp, "energy_split");
  const double e0 = energy(parts.front(), mp, plan).total;
  SplittingReport rep;
  for (double r : separations) {
    auto placed = detail::place_parts(parts, r);
    double expected = e0;
    for (std::size_t k = 1; k < placed.placed.size(); ++k) {
      expected += energy_per(placed.placed[k], mp, plan).total;
    }
    rep.separations.push_back(r);
    rep.cross_terms.push_back(std::abs(energy(placed.sum, mp, plan).total - expected));
  }
  detail::finish_report(rep, parts.size() > 1);
  return rep;
}

// Log-log decay slope over the two widest separations; the Hartree cross
// term should follow the kernel tail, slope ~ -(N - alpha).
inline double splitting_slope(const SplittingReport& rep) {
  const std::size_t n = rep.cross_terms.size();
  if (n < 2) throw usage_error("splitting_slope: needs at least two separations");
  if (!(rep.cross_terms[n - 1] > 0.0 && rep.cross_terms[n - 2] > 0.0)) {
    throw numeric_error("splitting_slope: cross terms must be positive", 0.0);
  }
  return std::log(rep.cross_terms[n - 1] / rep.cross_terms[n - 2]) /
         std::log(rep.separations[n - 1] / rep.separations[n - 2]);
}

}  // namespace srcq
