#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "srcq/errors.hpp"
#include "srcq/quadrature.hpp"

// Closed-form constants of the H^{1/2} setting: the Euler Gamma function,
// the Gagliardo normalization C(N,1/2), the sharp fractional Hardy constant
// C_{N,1/2,1/2} and the Coulomb coupling threshold mu_star(N), together with
// an independent quadrature cross-check of 1/C(N,1/2).

namespace srcq {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

struct ConstantReport {
  std::string name;
  double analytic_value = 0.0;
  std::optional<double> quadrature_value;
  std::optional<double> rel_error;
};

namespace detail {

// Lanczos approximation, g = 7, 9 coefficients.
inline double gamma_lanczos_pos(double x) {
  static constexpr double g = 7.0;
  static constexpr double coeff[9] = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  // x >= 0.5 here.
  const double z = x - 1.0;
  double a = coeff[0];
  for (int i = 1; i < 9; ++i) a += coeff[i] / (z + i);
  const double t = z + g + 0.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

}  // namespace detail

// Euler Gamma on the real line, poles excluded.
inline double gamma(double x) {
  if (!std::isfinite(x)) throw domain_error("gamma: non-finite argument");
  if (x <= 0.0 && x == std::floor(x)) {
    throw domain_error("gamma: pole at x = " + std::to_string(static_cast<long long>(x)));
  }
  if (x < 0.5) {
    // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
    return kPi / (std::sin(kPi * x) * detail::gamma_lanczos_pos(1.0 - x));
  }
  return detail::gamma_lanczos_pos(x);
}

// C(N,1/2) = Gamma((N+1)/2) / pi^{(N+1)/2}; equals 1/(2 pi) for N = 2.
inline double c_n_half(int dim) {
  if (dim < 2) throw domain_error("c_n_half: requires N >= 2");
  const double e = 0.5 * (dim + 1);
  return gamma(e) / std::pow(kPi, e);
}

// Sharp constant of [u]^2 >= C ∫ u^2/|x| dx in H^{1/2}(R^N).
// N = 1 hits the Gamma pole at (N-1)/4 = 0 and is excluded.
inline double hardy_sharp(int dim) {
  if (dim < 2) throw domain_error("hardy_sharp: requires N >= 2");
  const double a = gamma(0.25 * (dim + 1));
  const double b = gamma(0.25 * (dim - 1));
  return 2.0 * std::pow(kPi, 0.5 * dim) * a * a * std::abs(gamma(-0.5)) /
         (b * b * gamma(0.5 * (dim + 1)));
}

// mu_star(N) = 2 Gamma((N+1)/4)^2 / Gamma((N-1)/4)^2, the threshold below
// which the Coulomb-perturbed quadratic form stays positive definite.
inline double mu_star(int dim) {
  if (dim < 2) throw domain_error("mu_star: requires N >= 2");
  const double a = gamma(0.25 * (dim + 1));
  const double b = gamma(0.25 * (dim - 1));
  const double value = 2.0 * a * a / (b * b);
  // Same number through the Hardy route; the two must agree.
  const double alt = 0.5 * hardy_sharp(dim) * c_n_half(dim);
  if (std::abs(value - alt) > 1e-12 * std::abs(value)) {
    throw numeric_error("mu_star: identity mu* = hardy*C/2 violated",
                        std::abs(value - alt) / std::abs(value));
  }
  return value;
}

// Quadrature cross-check of 1/C(N,1/2).  For N = 2 the integral is
// pi ∫_R (1+t^2)^{-3/2} dt; for N >= 3 it is pi * omega_{N-2} times the
// radial integral of r^{N-2} (1+r^2)^{-(N+1)/2}.  The finite cut R is
// completed by the analytic tail bound of the r^{-3} asymptote.
inline ConstantReport verify_c_n_half(int dim, double tol) {
  if (dim < 2) throw domain_error("verify_c_n_half: requires N >= 2");
  if (tol <= 0.0) throw domain_error("verify_c_n_half: tol must be positive");
  const double cut = 2.0e5;
  const auto integrand = [dim](double r) {
    return std::pow(r, dim - 2) * std::pow(1.0 + r * r, -0.5 * (dim + 1));
  };
  auto radial = integrate_adaptive(integrand, 0.0, cut, 0.0, 0.1 * tol);
  // ∫_R^inf r^{N-2}(1+r^2)^{-(N+1)/2} dr = 1/(2R^2) + O(R^-4), any N.
  const double tail = 0.5 / (cut * cut);
  double quad;
  if (dim == 2) {
    quad = kPi * 2.0 * (radial.value + tail);  // even integrand over R
  } else {
    const double omega = 2.0 * std::pow(kPi, 0.5 * (dim - 1)) / gamma(0.5 * (dim - 1));
    quad = kPi * omega * (radial.value + tail);
  }
  const double analytic = 1.0 / c_n_half(dim);
  ConstantReport report;
  report.name = "1/C(" + std::to_string(dim) + ",1/2)";
  report.analytic_value = analytic;
  report.quadrature_value = quad;
  report.rel_error = std::abs(analytic - quad) / std::abs(analytic);
  return report;
}

}  // namespace srcq
