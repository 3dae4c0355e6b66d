// Release gate: one line per criterion, PASS or FAIL, with the failing
// clauses spelled out.  The process exit code is the number of failed
// criteria, so the harness reports an honest verdict.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "srcq/diagnostics.hpp"
#include "srcq/io.hpp"
#include "srcq/quadrature.hpp"
#include "srcq/solver.hpp"

using namespace srcq;

namespace {

struct Clause {
  std::string name;
  bool passed;
  std::string detail;
};

struct Criterion {
  std::vector<Clause> clauses;

  void check(const std::string& name, bool ok, const std::string& detail = "") {
    clauses.push_back({name, ok, detail});
  }
  bool passed() const {
    return std::all_of(clauses.begin(), clauses.end(),
                       [](const Clause& c) { return c.passed; });
  }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Field random_field(const GridPtr& grid, unsigned seed, double amp = 1.0) {
  Field u(grid);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amp, amp);
  for (double& v : u.values) v = dist(rng);
  return u;
}

Field gaussian_bump(const GridPtr& grid, double width, double amp = 1.0) {
  Field u(grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = grid->radius(i);
    u[i] = amp * std::exp(-r * r / (width * width));
  }
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

ModelParams make_params(const GridPtr& grid, double mu, double k_const = 0.0,
                        double p = 3.0, double alpha = 1.5, double q = 2.5,
                        const NonlinearitySpec* nl = nullptr) {
  NonlinearitySpec spec = nl ? *nl : NonlinearitySpec::power(p, q);
  return ModelParams{grid->dim(), 1.0, mu, alpha, spec.p(), spec.q(), spec,
                     build_potentials(grid, constant_fn(2.0), zero_fn(),
                                      constant_fn(k_const)),
                     grid};
}

double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

// -------------------------------------------------------------- 1: constants

Criterion criterion_constants() {
  Criterion c;
  c.check("mu*(2) to 5 decimals",
          std::abs(mu_star(2) - 0.22847) <= 0.5e-5, num(mu_star(2)));
  c.check("mu*(3) = 2/pi to 1e-12",
          std::abs(mu_star(3) - 2.0 / kPi) <= 1e-12, num(mu_star(3)));
  bool identity = true;
  double worst = 0.0;
  for (int n = 2; n <= 10; ++n) {
    const double d = rel_diff(mu_star(n), 0.5 * hardy_sharp(n) * c_n_half(n));
    worst = std::max(worst, d);
    identity = identity && d <= 1e-12;
  }
  c.check("mu* = (1/2) hardy_sharp * c_n_half, N = 2..10", identity,
          "worst rel diff " + num(worst));
  bool quad = true;
  worst = 0.0;
  for (int n = 2; n <= 6; ++n) {
    const double err = verify_c_n_half(n, 1e-8).rel_error.value();
    worst = std::max(worst, err);
    quad = quad && err <= 1e-8;
  }
  c.check("quadrature check of 1/C(N,1/2), N = 2..6", quad,
          "worst rel err " + num(worst));
  return c;
}

// -------------------------------------------------------------- 2: spectral

Criterion criterion_spectral() {
  Criterion c;
  {
    auto grid = make_grid(2, 64, 20.0);
    Field u = random_field(grid, 3);
    Field back = inverse_transform(forward_transform(u));
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      scale = std::max(scale, std::abs(u[i]));
      diff = std::max(diff, std::abs(u[i] - back[i]));
    }
    c.check("transform round trip <= 1e-12", diff <= 1e-12 * scale,
            num(diff / scale));
  }
  {
    // Gaussian e^{-r^2/w^2}: closed-form transform reduces the kinetic form
    // to a radial integral (N = 2, m = 1)
    auto grid = make_grid(2, 64, 20.0);
    const double w = 1.5, a = 1.0 / (w * w), m = 1.0;
    Field u = gaussian_bump(grid, w);
    const double discrete = kinetic_quadratic(u, m);
    const auto integrand = [a, m](double r) {
      return std::sqrt(r * r + m * m) * std::exp(-r * r / (2.0 * a)) * r;
    };
    auto radial = integrate_adaptive(integrand, 0.0, 60.0, 0.0, 1e-12);
    const double reference = kPi / (2.0 * a * a) * radial.value;
    c.check("Gaussian kinetic form vs radial quadrature <= 1e-3",
            rel_diff(discrete, reference) <= 1e-3,
            num(discrete) + " vs " + num(reference));
  }
  {
    // brute-force double sum for the half seminorm: spectral value on the
    // M = 64 grid, direct sum on the M = 32 restriction of the same bump
    auto fine = make_grid(2, 64, 20.0);
    const double spectral = gagliardo_sq(gaussian_bump(fine, 1.5));
    auto grid = make_grid(2, 32, 20.0);
    Field u = gaussian_bump(grid, 1.5);
    const double h = grid->spacing();
    double brute = 0.0;
    double xi[2], xj[2];
    for (std::size_t i = 0; i < u.size(); ++i) {
      grid->coords(i, xi);
      for (std::size_t j = 0; j < u.size(); ++j) {
        if (i == j) continue;
        grid->coords(j, xj);
        const double dx = xi[0] - xj[0], dy = xi[1] - xj[1];
        const double dist = std::sqrt(dx * dx + dy * dy);
        const double du = u[i] - u[j];
        brute += du * du / (dist * dist * dist);
      }
    }
    brute *= h * h * h * h;
    c.check("half seminorm vs brute-force double sum <= 5%",
            rel_diff(spectral, brute) <= 0.05,
            num(spectral) + " vs " + num(brute) +
                " (the truncated sum misses the near-diagonal ball, an O(h) "
                "deficit, and all periodic-image pairs, an O(w^2/L) one; at "
                "M = 32 the two floors trade off through h = L/M and never "
                "drop below ~20%.  Richardson-extrapolating the sum in h and "
                "adding the analytic image tail reproduces the spectral value "
                "to 3 digits, which is the real content of this oracle)");
  }
  return c;
}

// -------------------------------------------------------------- 3: Hardy

Criterion criterion_hardy() {
  Criterion c;
  for (int dim : {2, 3}) {
    auto grid = dim == 2 ? make_grid(2, 32, 16.0) : make_grid(3, 16, 8.0);
    const double hardy = hardy_sharp(dim);
    const double cutoff = 2.0 * kPi / grid->box_length() * (dim == 2 ? 6.0 : 4.0);
    auto mp = make_params(grid, 0.95 * mu_star(dim), 0.0, 2.2, 2.2 * dim / 3.0);
    bool hardy_ok = true, qmu_ok = true;
    double worst_margin = 1e300;
    for (unsigned seed = 0; seed < 200; ++seed) {
      Field u = lowpass(random_field(grid, 1000 * dim + seed), cutoff);
      double cint = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        cint += u[i] * u[i] / grid->radius(i);
      }
      cint *= grid->cell_volume();
      hardy_ok = hardy_ok && gagliardo_sq(u) >= 0.99 * hardy * cint;
      const double qmu = q_mu_form(u, mp);
      qmu_ok = qmu_ok && qmu > 0.0;
      worst_margin = std::min(worst_margin, qmu);
    }
    c.check("Hardy inequality (0.99 slack), 200 fields, N = " +
                std::to_string(dim),
            hardy_ok);
    c.check("Q_mu > 0 at mu = 0.95 mu*, N = " + std::to_string(dim), qmu_ok,
            "min Q_mu " + num(worst_margin));
    // the analytic coercivity constant c_n_half/2 - mu/hardy changes sign
    // exactly at mu*
    double lo = 0.0, hi = 10.0;
    auto g = [dim, hardy](double mu) { return 0.5 * c_n_half(dim) - mu / hardy; };
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) > 0.0 ? lo : hi) = mid;
    }
    const double root = 0.5 * (lo + hi);
    c.check("coercivity constant vanishes at mu* (bisection, 1e-10), N = " +
                std::to_string(dim),
            std::abs(root - mu_star(dim)) <= 1e-10,
            num(root) + " vs " + num(mu_star(dim)));
  }
  return c;
}

// -------------------------------------------------------------- 4: gradient

Criterion criterion_gradient() {
  Criterion c;
  auto grid = make_grid(2, 16, 8.0);
  std::vector<NonlinearitySpec> families = {
      NonlinearitySpec::power(3.0, 2.5), NonlinearitySpec::log_power(3.0, 2.2),
      NonlinearitySpec::piecewise(3.0, 2.5, 2.0)};
  const double eps = 1e-5;
  for (const auto& nl : families) {
    auto mp = make_params(grid, 0.05, 0.3, 3.0, 1.5, 2.5, &nl);
    RieszPlan plan(grid, mp.alpha);
    bool ok = true;
    double worst = 0.0;
    for (unsigned seed = 0; seed < 50; ++seed) {
      Field u = gaussian_bump(grid, 1.5) + random_field(grid, 40 + seed, 0.1);
      Field phi = random_field(grid, 140 + seed, 0.5);
      const double analytic = first_variation(u, mp, plan, phi);
      const double ep = energy(u + eps * phi, mp, plan).total;
      const double em = energy(u + (-eps) * phi, mp, plan).total;
      const double numeric = (ep - em) / (2.0 * eps);
      const double rel = rel_diff(analytic, numeric);
      worst = std::max(worst, rel);
      ok = ok && rel <= 1e-6;
    }
    c.check("first variation vs central differences, " + nl.name(), ok,
            "worst rel err " + num(worst));
  }
  {
    auto mp = make_params(grid, 0.0);
    RieszPlan plan(grid, mp.alpha);
    Field u = gaussian_bump(grid, 1.5) + random_field(grid, 5, 0.1);
    const double lhs = dd_derivative(plan, u, mp.nonlinearity, u);
    const double rhs = 2.0 * mp.power_p * dd_value(plan, u, mp.nonlinearity);
    c.check("Euler identity D'(u)(u) = 2p D(u) to 1e-10",
            rel_diff(lhs, rhs) <= 1e-10, num(rel_diff(lhs, rhs)));
  }
  return c;
}

// -------------------------------------------------------------- 5: Riesz

Criterion criterion_riesz() {
  Criterion c;
  struct Case {
    int dim;
    std::size_t points;
  };
  for (const Case& cs : {Case{2, 32}, Case{3, 16}}) {
    auto grid = make_grid(cs.dim, cs.points, 8.0);
    const double alpha = cs.dim == 2 ? 1.5 : 2.2;
    RieszPlan fast(grid, alpha, RieszMethod::fft_kernel);
    RieszPlan direct(grid, alpha, RieszMethod::direct);
    Field g = random_field(grid, 17 + cs.dim);
    Field a = fast.convolve(g);
    Field b = direct.convolve(g);
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      scale = std::max(scale, std::abs(b[i]));
      diff = std::max(diff, std::abs(a[i] - b[i]));
    }
    c.check("direct vs FFT kernel <= 1e-10, N = " + std::to_string(cs.dim),
            diff <= 1e-10 * scale, num(diff / scale));
  }
  {
    auto grid = make_grid(2, 32, 8.0);
    auto nl = NonlinearitySpec::power(3.0, 2.5);
    RieszPlan plan(grid, 1.5);
    Field u = gaussian_bump(grid, 1.5);
    const double base = dd_value(plan, u, nl);
    bool ok = true;
    double worst = 0.0;
    for (double s : {0.5, 2.0, 3.0}) {
      const double rel =
          rel_diff(dd_value(plan, s * u, nl), std::pow(s, 2.0 * nl.p()) * base);
      worst = std::max(worst, rel);
      ok = ok && rel <= 1e-12;
    }
    c.check("pure-power homogeneity D(su) = s^{2p} D(u) to 1e-12", ok,
            "worst rel diff " + num(worst));
  }
  return c;
}

// -------------------------------------------------------------- 6: hypotheses

Criterion criterion_hypotheses() {
  Criterion c;
  std::vector<NonlinearitySpec> families = {
      NonlinearitySpec::power(3.0, 2.5), NonlinearitySpec::log_power(3.0, 2.2),
      NonlinearitySpec::piecewise(3.0, 2.5, 2.0)};
  for (const auto& nl : families) {
    auto suite = run_hypothesis_suite(nl, 1.5 / 2.0);
    const auto pts = log_samples(nl, 1e-4, 1e4, 4096);
    double fmin = 0.0;
    for (double u : pts) fmin = std::min(fmin, nl.F_core(u));
    const double c_eps = feps_constants(
        [&nl](double u) { return nl.F_core(u); }, nl.p(), 1e-2, pts);
    c.check("full hypothesis suite, " + nl.name(),
            suite.all_passed() && fmin >= 0.0 && std::isfinite(c_eps));
  }
  {
    // linear control: f(u) = u has no superlinear smallness at 0
    const auto pts = log_samples(NonlinearitySpec::power(3.0, 2.5), 1e-4, 1e4, 4096);
    auto rep = check_f2([](double u) { return u; }, pts);
    c.check("linear control fails (F2)", !rep.passed);
  }
  return c;
}

// -------------------------------------------------------------- 7: fibering

Criterion criterion_fibering() {
  Criterion c;
  auto grid = make_grid(2, 8, 8.0);
  std::vector<NonlinearitySpec> families = {
      NonlinearitySpec::power(3.0, 2.5), NonlinearitySpec::log_power(3.0, 2.2),
      NonlinearitySpec::piecewise(3.0, 2.5, 2.0)};
  std::vector<double> t_grid;
  for (int i = 0; i <= 60; ++i) t_grid.push_back(std::pow(10.0, -3.0 + 0.1 * i));
  for (const auto& nl : families) {
    auto mp = make_params(grid, 0.05, 0.2, 3.0, 1.5, 2.5, &nl);
    RieszPlan plan(grid, mp.alpha);
    bool unique = true;
    for (unsigned seed = 0; seed < 100 && unique; ++seed) {
      Field u = random_field(grid, 300 + seed);
      auto table = fibering_scan(u, mp, plan, t_grid);
      int transitions = 0;
      for (std::size_t i = 1; i < table.size(); ++i) {
        if (table[i - 1].dphi > 0.0 && table[i].dphi < 0.0) ++transitions;
        if (table[i - 1].dphi < 0.0 && table[i].dphi > 0.0) transitions += 100;
      }
      unique = transitions == 1;
    }
    c.check("exactly one fibering sign change, 100 fields, " + nl.name(),
            unique);
  }
  {
    auto big = make_grid(2, 16, 8.0);
    auto mp = make_params(big, 0.0, 0.0);
    RieszPlan plan(big, mp.alpha);
    bool match = true;
    double worst = 0.0;
    for (unsigned seed = 0; seed < 20; ++seed) {
      Field u = gaussian_bump(big, 1.5) + random_field(big, 70 + seed, 0.05);
      const double t_root = project(u, mp, plan).t_star;
      const double t_oracle = power_projection_oracle(u, mp, plan);
      const double rel = rel_diff(t_root, t_oracle);
      worst = std::max(worst, rel);
      match = match && rel <= 1e-10;
    }
    c.check("projection matches the pure-power closed form to 1e-10", match,
            "worst rel diff " + num(worst));
  }
  {
    auto big = make_grid(2, 16, 8.0);
    auto mp = make_params(big, 0.1, 0.3);
    RieszPlan plan(big, mp.alpha);
    bool ok = true;
    for (unsigned seed = 0; seed < 20; ++seed) {
      Field u = gaussian_bump(big, 1.0 + 0.02 * seed) +
                random_field(big, 90 + seed, 0.05);
      Field w = project(u, mp, plan).t_star * u;
      const double e = energy(w, mp, plan).total;
      ok = ok && membership_margin(w, mp, plan) > 0.0 &&
           e >= (0.5 - 1.0 / mp.power_q) * q_mu_form(w, mp) - 1e-10 && e > 0.0;
    }
    c.check("projected points satisfy membership and coercivity bounds", ok);
  }
  return c;
}

// -------------------------------------------------------------- 8: ground state

Criterion criterion_ground_state() {
  Criterion c;
  RunConfig cfg;  // documented defaults = the reference configuration
  ModelParams mp = build_model(cfg);
  RieszPlan plan(mp.grid, mp.alpha);
  SolveOptions opts;
  opts.restarts = 5;
  auto res = ground_state(mp, plan, opts);
  c.check("grad_norm <= 1e-8", res.grad_norm <= 1e-8, num(res.grad_norm));
  c.check("converged within 2000 iterations", res.iterations < 2000,
          std::to_string(res.iterations) + " iterations");
  const auto [mn, mx] = std::minmax_element(res.restart_energies.begin(),
                                            res.restart_energies.end());
  c.check("5 restarts agree within 1e-6", *mx - *mn <= 1e-6,
          "spread " + num(*mx - *mn));
  c.check("energy strictly positive", res.energy > 0.0, num(res.energy));
  double umin = res.field[0], umax = res.field[0];
  for (double v : res.field.values) {
    umin = std::min(umin, v);
    umax = std::max(umax, v);
  }
  const double peak = std::max(std::abs(umin), std::abs(umax));
  c.check("single-signed profile", umin * umax >= -1e-8 * peak * peak,
          "min " + num(umin) + ", max " + num(umax) +
              " (spectral truncation leaves sign-changing far-field ripples "
              "of relative size ~1e-4; decreasing with resolution but present "
              "at every finite M)");
  const double defect = symmetry_defect(res.field);
  c.check("radial symmetry defect <= 1e-6", defect <= 1e-6, num(defect));
  return c;
}

// -------------------------------------------------------------- 9: continuation

Criterion criterion_continuation() {
  Criterion c;
  RunConfig cfg;
  ModelParams mp = build_model(cfg);
  RieszPlan plan(mp.grid, mp.alpha);
  SolveOptions opts;
  std::vector<double> schedule;
  for (int k = 1; k <= 8; ++k) schedule.push_back(mu_star(2) / std::pow(2.0, k));
  bool monotone = true;
  std::string monotone_detail;
  ContinuationResult res;
  try {
    res = continuation_mu(mp, plan, schedule, opts);
  } catch (const numeric_error& ex) {
    monotone = false;
    monotone_detail = ex.what();
  }
  c.check("c_n <= c0 along the whole schedule", monotone, monotone_detail);
  if (monotone) {
    bool shrinking = true;
    std::vector<double> gaps;
    for (const auto& row : res.rows) gaps.push_back(res.c0 - row.energy);
    for (std::size_t i = 1; i < gaps.size(); ++i) {
      shrinking = shrinking && gaps[i] <= gaps[i - 1] + 1e-12;
    }
    c.check("gaps non-increasing as mu decreases", shrinking);
    const double final_gap = gaps.back();
    c.check("final gap <= 1e-4", final_gap <= 1e-4,
            "gap " + num(final_gap) +
                " at mu = mu*/256 (the gap is first order in mu, "
                "~ mu * int u^2/|x| with int u^2/|x| ~ 2.4, so reaching 1e-4 "
                "needs mu ~ mu*/2^13; the 8-step schedule cannot get there)");
  }
  return c;
}

// -------------------------------------------------------------- 10: probe

Criterion criterion_probe() {
  Criterion c;
  // shift magnitude 8 requires |z| <= L/2 - 1, hence the L = 20 box
  auto grid = make_grid(2, 80, 20.0);
  Field base = gaussian_init(grid);
  std::vector<std::vector<long long>> shifts = {{0, 0}, {2, 0}, {4, 0}, {8, 0}};
  {
    auto mp = make_params(grid, -0.1);
    RieszPlan plan(grid, mp.alpha);
    auto table = nonexistence_probe(mp, plan, base, shifts);
    bool decreasing = true;
    for (std::size_t i = 1; i < table.size(); ++i) {
      decreasing = decreasing && table[i].sup_energy < table[i - 1].sup_energy;
    }
    c.check("mu = -0.1: fibering maxima strictly decrease with |z|", decreasing,
            num(table.front().sup_energy) + " -> " + num(table.back().sup_energy));
  }
  {
    auto mp = make_params(grid, 0.1);
    RieszPlan plan(grid, mp.alpha);
    auto table = nonexistence_probe(mp, plan, base, shifts);
    bool increasing = true;
    for (std::size_t i = 1; i < table.size(); ++i) {
      increasing = increasing && table[i].sup_energy > table[i - 1].sup_energy;
    }
    c.check("mu = +0.1 control: trend reverses", increasing,
            num(table.front().sup_energy) + " -> " + num(table.back().sup_energy));
  }
  return c;
}

// -------------------------------------------------------------- 11: splitting

Criterion criterion_splitting() {
  Criterion c;
  auto grid = make_grid(2, 128, 64.0);
  auto nl = NonlinearitySpec::power(3.0, 2.5);
  RieszPlan plan(grid, 1.5);
  std::vector<Field> parts = {gaussian_bump(grid, 1.0), gaussian_bump(grid, 1.0)};
  auto rep = brezis_lieb_d(parts, {4.0, 8.0, 16.0}, plan, nl);
  bool decreasing = true;
  for (std::size_t i = 1; i < rep.cross_terms.size(); ++i) {
    decreasing = decreasing && rep.cross_terms[i] < rep.cross_terms[i - 1];
  }
  c.check("cross term strictly decreasing under separation doubling",
          decreasing);
  const double slope = splitting_slope(rep);
  c.check("fitted decay slope within 0.3 of -(N - alpha)",
          std::abs(slope - (-0.5)) <= 0.3, "slope " + num(slope));
  auto single = brezis_lieb_d({parts[0]}, {4.0, 8.0}, plan, nl);
  const double scale = dd_value(plan, parts[0], nl);
  c.check("single-part defect at round-off",
          std::abs(single.cross_terms[0]) <= 1e-12 * scale &&
              std::abs(single.cross_terms[1]) <= 1e-12 * scale);
  return c;
}

}  // namespace

int main() {
  struct Entry {
    const char* title;
    Criterion (*run)();
  };
  const Entry entries[] = {
      {"special constants", criterion_constants},
      {"spectral fidelity", criterion_spectral},
      {"Hardy inequality and coercivity threshold", criterion_hardy},
      {"gradient correctness", criterion_gradient},
      {"Riesz two-path equivalence", criterion_riesz},
      {"nonlinearity hypothesis suites", criterion_hypotheses},
      {"fibering uniqueness and projection", criterion_fibering},
      {"end-to-end ground state", criterion_ground_state},
      {"vanishing-mu continuation", criterion_continuation},
      {"negative-mu translation probe", criterion_probe},
      {"splitting diagnostics", criterion_splitting},
  };
  int failures = 0;
  int id = 0;
  for (const Entry& entry : entries) {
    ++id;
    const auto start = std::chrono::steady_clock::now();
    Criterion crit;
    try {
      crit = entry.run();
    } catch (const std::exception& ex) {
      crit.check("completed without unexpected errors", false, ex.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const bool ok = crit.passed();
    failures += ok ? 0 : 1;
    std::printf("criterion %2d %s  %s  (%.1f s)\n", id, ok ? "PASS" : "FAIL",
                entry.title, seconds);
    if (!ok) {
      for (const Clause& cl : crit.clauses) {
        std::printf("    %s  %s%s%s\n", cl.passed ? "pass" : "FAIL",
                    cl.name.c_str(), cl.detail.empty() ? "" : ": ",
                    cl.detail.c_str());
      }
    }
  }
  std::printf("%d/11 criteria passed\n", 11 - failures);
  return failures;
}
