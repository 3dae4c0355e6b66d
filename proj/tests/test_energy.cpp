#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "srcq/energy.hpp"

using namespace srcq;

namespace {

ModelParams make_params(const GridPtr& grid, double mu, double k_const = 0.0,
                        double p = 3.0, double alpha = 1.5, double q = 2.5) {
  return ModelParams{grid->dim(), 1.0, mu, alpha, p, q,
                     NonlinearitySpec::power(p, q),
                     build_potentials(grid, constant_fn(2.0), zero_fn(),
                                      constant_fn(k_const)),
                     grid};
}

Field random_field(const GridPtr& grid, unsigned seed, double amp = 1.0) {
  Field u(grid);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amp, amp);
  for (double& v : u.values) v = dist(rng);
  return u;
}

// Keep only modes with |xi| <= cutoff.
Field lowpass(const Field& u, double cutoff) {
  SpectralField uh = forward_transform(u);
  for (std::size_t k = 0; k < uh.coefficients.size(); ++k) {
    if (u.grid->freq_norm(k) > cutoff) uh.coefficients[k] = 0.0;
  }
  return inverse_transform(uh);
}

Field gaussian_bump(const GridPtr& grid, double width) {
  Field u(grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = grid->radius(i);
    u[i] = std::exp(-r * r / (width * width));
  }
  return u;
}

}  // namespace

TEST_CASE("quadratic form closed form on a DC field") {
  auto grid = make_grid(2, 16, 8.0);
  auto mp = make_params(grid, 0.0);
  const double c = 1.7;
  Field u(grid, c);
  const double vol = std::pow(8.0, 2);
  // Q = m c^2 L^N + (2 - 1) c^2 L^N = 2 c^2 L^N for V = 2, m = 1
  CHECK(q_form(u, mp) == Catch::Approx(2.0 * c * c * vol).epsilon(1e-12));
  CHECK(q_mu_form(u, mp) == Catch::Approx(q_form(u, mp)).epsilon(1e-15));
  Field zero(grid);
  CHECK(q_form(zero, mp) == 0.0);
  CHECK(q_mu_form(zero, mp) == 0.0);
}

TEST_CASE("mu_inner reproduces q_mu_form and is symmetric") {
  auto grid = make_grid(2, 16, 8.0);
  auto mp = make_params(grid, 0.15);
  Field u = random_field(grid, 3);
  Field v = random_field(grid, 4);
  CHECK(mu_inner(u, u, mp) == Catch::Approx(q_mu_form(u, mp)).epsilon(1e-12));
  CHECK(mu_inner(u, v, mp) == Catch::Approx(mu_inner(v, u, mp)).epsilon(1e-12));
}

TEST_CASE("sandwich inequalities hold with positive margin") {
  auto grid = make_grid(2, 32, 16.0);
  auto mp = make_params(grid, 0.0);
  for (unsigned seed : {11u, 12u, 13u}) {
    Field u = lowpass(random_field(grid, seed), 2.0 * kPi / 16.0 * 6.0);
    auto rep = sandwich_check(u, mp);
    CHECK(rep.lower_holds);
    CHECK(rep.upper_holds);
    CHECK(rep.lower_margin > 0.0);
    CHECK(rep.upper_margin > 0.0);
  }
}

TEST_CASE("mu lower constant tracks the mu_star threshold") {
  auto grid = make_grid(3, 8, 8.0);
  const double ms = mu_star(3);
  auto mp_sub = make_params(grid, 0.9 * ms, 0.0, 3.0, 2.2, 2.5);
  Field u = gaussian_bump(grid, 2.0);
  auto rep_sub = sandwich_check(u, mp_sub);
  CHECK(rep_sub.mu_lower_constant > 0.0);
  CHECK(rep_sub.mu_coercive);
  // coercivity constant positivity is exactly mu < mu*, up to the V term
  auto mp_super = make_params(grid, 1.5 * ms, 0.0, 3.0, 2.2, 2.5);
  auto rep_super = sandwich_check(u, mp_super);
  CHECK(rep_super.mu_lower_constant <= 0.0);
  CHECK_FALSE(rep_super.mu_coercive);
}

TEST_CASE("discrete fractional Hardy inequality with 0.99 slack") {
  auto grid = make_grid(2, 32, 16.0);
  const double hardy = hardy_sharp(2);
  for (unsigned seed : {21u, 22u, 23u, 24u}) {
    Field u = lowpass(random_field(grid, seed), 2.0 * kPi / 16.0 * 6.0);
    double cint = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      cint += u[i] * u[i] / grid->radius(i);
    }
    cint *= grid->cell_volume();
    CHECK(gagliardo_sq(u) >= 0.99 * hardy * cint);
  }
}

TEST_CASE("Q_mu positive on random fields below the threshold") {
  auto grid = make_grid(2, 16, 8.0);
  auto mp = make_params(grid, 0.95 * mu_star(2));
  for (unsigned seed = 0; seed < 200; ++seed) {
    Field u = random_field(grid, 1000 + seed);
    CHECK(q_mu_form(u, mp) > 0.0);
  }
}

TEST_CASE("energy breakdown sums and signs") {
  auto grid = make_grid(2, 16, 8.0);
  auto mp = make_params(grid, 0.1, 0.4);
  RieszPlan plan(grid, mp.alpha);
  Field u = gaussian_bump(grid, 1.5);
  auto b = energy(u, mp, plan);
  CHECK(b.total ==
        Catch::Approx(b.kinetic_potential + b.coulomb + b.hartree + b.k_term)
            .epsilon(1e-12));
  CHECK(b.hartree <= 0.0);
  CHECK(b.k_term >= 0.0);
  Field zero(grid);
  auto bz = energy(zero, mp, plan);
  CHECK(bz.total == 0.0);
  CHECK(bz.kinetic_potential == 0.0);
  CHECK(bz.coulomb == 0.0);
  CHECK(bz.hartree == 0.0);
  CHECK(bz.k_term == 0.0);
}

TEST_CASE("energy agrees with the half-norm-minus-I decomposition") {
  auto grid = make_grid(2, 16, 8.0);
  auto mp = make_params(grid, 0.12, 0.3);
  RieszPlan plan(grid, mp.alpha);
  Field u = random_field(grid, 7);
  const double i_of_u = 0.5 * dd_value(plan, u, mp.nonlinearity) -
                        k_integral(u, mp) / mp.power_q;
  CHECK(energy(u, mp, plan).total ==
        Catch::Approx(0.5 * q_mu_form(u, mp) - i_of_u).epsilon(1e-12));
}

TEST_CASE("periodic functional: reduction and shift invariance") {
  auto grid = make_grid(2, 16, 8.0);
  auto mp = make_params(grid, 0.0, 0.3);
  RieszPlan plan(grid, mp.alpha);
  Field u = gaussian_bump(grid, 1.5);
  // mu = 0, V_l = 0: energy_per coincides with energy
  CHECK(energy_per(u, mp, plan).total ==
        Catch::Approx(energy(u, mp, plan).total).epsilon(1e-15));

  // periodic potential, circular shift by one unit cell (M/L grid cells)
  auto v_p = [](const double* x, int dim) {
    double s = 2.0;
    for (int a = 0; a < dim; ++a) s += 0.2 * std::sin(2.0 * kPi * x[a]);
    return s;
  };
  ModelParams mp2{2, 1.0, 0.0, 1.5, 3.0, 2.5, NonlinearitySpec::power(3.0, 2.5),
                  build_potentials(grid, v_p, zero_fn(), constant_fn(0.3)), grid};
  const std::size_t M = grid->points_per_axis();
  const std::size_t shift = M / 8;  // one unit of the Z^N lattice
  Field shifted(grid);
  std::size_t idx[8];
  for (std::size_t i = 0; i < u.size(); ++i) {
    grid->unravel(i, idx);
    idx[0] = (idx[0] + shift) % M;
    shifted[grid->ravel(idx)] = u[i];
  }
  const double e0 = energy_per(u, mp2, plan).total;
  const double e1 = energy_per(shifted, mp2, plan).total;
  CHECK(e1 == Catch::Approx(e0).epsilon(1e-11));
}

TEST_CASE("first variation matches central finite differences") {
  auto grid = make_grid(2, 16, 8.0);
  RieszPlan plan(grid, 1.5);
  for (double mu : {0.0, 0.1}) {
    auto mp = make_params(grid, mu, 0.4);
    Field u = gaussian_bump(grid, 2.0);
    Field phi = lowpass(random_field(grid, 31), 2.0 * kPi);
    const double eps = 1e-5;
    Field up = u, um = u;
    axpy(eps, phi, up);
    axpy(-eps, phi, um);
    const double fd =
        (energy(up, mp, plan).total - energy(um, mp, plan).total) / (2.0 * eps);
    CHECK(first_variation(u, mp, plan, phi) == Catch::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("gradient_field represents the first variation") {
  auto grid = make_grid(2, 16, 8.0);
  auto mp = make_params(grid, 0.08, 0.25);
  RieszPlan plan(grid, mp.alpha);
  Field u = gaussian_bump(grid, 1.8);
  Field g = gradient_field(u, mp, plan);
  for (unsigned seed : {41u, 42u, 43u}) {
    Field phi = random_field(grid, seed);
    CHECK(first_variation(u, mp, plan, phi) ==
          Catch::Approx(l2_inner(g, phi)).epsilon(1e-10));
  }
  Field zero(grid);
  Field gz = gradient_field(zero, mp, plan);
  for (double v : gz.values) CHECK(v == 0.0);
}

TEST_CASE("small-sphere positivity: E >= r^2/4 for small r") {
  auto grid = make_grid(2, 16, 8.0);
  auto mp = make_params(grid, 0.1, 0.2);
  RieszPlan plan(grid, mp.alpha);
  std::vector<Field> samples = {gaussian_bump(grid, 1.0), gaussian_bump(grid, 2.5),
                                lowpass(random_field(grid, 55), 2.0 * kPi)};
  auto min_excess = [&](double r) {
    double worst = 1e300;
    for (const auto& s : samples) {
      Field u = (r / std::sqrt(q_mu_form(s, mp))) * s;
      worst = std::min(worst, energy(u, mp, plan).total - 0.25 * r * r);
    }
    return worst;
  };
  // bisect down from r = 1 until the sphere bound holds
  double r = 1.0;
  int steps = 0;
  while (min_excess(r) < 0.0 && steps++ < 60) r *= 0.5;
  REQUIRE(steps < 60);
  CHECK(r > 0.0);
  CHECK(min_excess(r) >= 0.0);
  CHECK(min_excess(0.5 * r) >= 0.0);
}

TEST_CASE("plan and model must agree") {
  auto grid = make_grid(2, 16, 8.0);
  auto mp = make_params(grid, 0.0);  // alpha = 1.5
  RieszPlan plan(grid, 1.0);
  Field u(grid);
  CHECK_THROWS_AS(energy(u, mp, plan), usage_error);
  CHECK_THROWS_AS(gradient_field(u, mp, plan), usage_error);
}

TEST_CASE("cell-averaged Coulomb samples dominate node samples near 0") {
  auto grid = make_grid(2, 16, 8.0);
  auto node = build_potentials(grid, constant_fn(2.0), zero_fn(), zero_fn());
  auto avg = build_potentials(grid, constant_fn(2.0), zero_fn(), zero_fn(),
                              CoulombSampling::cell_average);
  const double h = grid->spacing();
  bool any_diff = false;
  for (std::size_t i = 0; i < node.coulomb.size(); ++i) {
    CHECK(std::isfinite(avg.coulomb[i]));
    if (grid->radius(i) > 4.0 * h) {
      CHECK(avg.coulomb[i] == node.coulomb[i]);
    } else {
      // 1/|x| is convex, so the cell mean exceeds the midpoint value
      CHECK(avg.coulomb[i] >= node.coulomb[i]);
      if (avg.coulomb[i] > node.coulomb[i]) any_diff = true;
    }
  }
  CHECK(any_diff);
}
