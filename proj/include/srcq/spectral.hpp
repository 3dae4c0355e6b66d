#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "srcq/fft.hpp"
#include "srcq/grid.hpp"

namespace srcq {

// Transform convention (fixed once, everything below refers to it):
//   forward:  u_hat(xi) = h^N sum_x u(x) e^{-i xi.x}
//   inverse:  u(x) = L^{-N} sum_xi u_hat(xi) e^{+i xi.x}
//   spectral sums estimating continuum d(xi)-integrals carry weight L^{-N}.
// With these weights the discrete Plancherel identity reads
//   sum_x |u|^2 h^N = L^{-N} sum_xi |u_hat|^2,
// so spectral quadratic forms are consistent estimates of their continuum
// counterparts.  The half-cell node offset enters as a per-axis phase.

namespace detail {

// Phase e^{s i xi_k x0} per axis index, s = -1 forward, +1 inverse.
inline std::vector<std::complex<double>> offset_phases(const Grid& g, double sign) {
  const double x0 = 0.5 * g.spacing() - 0.5 * g.box_length();
  std::vector<std::complex<double>> ph(g.points_per_axis());
  for (std::size_t k = 0; k < ph.size(); ++k) {
    const double ang = sign * g.freq(k) * x0;
    ph[k] = std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return ph;
}

inline void apply_axis_phases(const Grid& g, std::vector<std::complex<double>>& data,
                              const std::vector<std::complex<double>>& ph) {
  std::size_t idx[8];
  for (std::size_t flat = 0; flat < data.size(); ++flat) {
    g.unravel(flat, idx);
    std::complex<double> p(1.0, 0.0);
    for (int a = 0; a < g.dim(); ++a) p *= ph[idx[a]];
    data[flat] *= p;
  }
}

}  // namespace detail

inline SpectralField forward_transform(const Field& u) {
  const Grid& g = *u.grid;
  std::vector<std::complex<double>> data(u.values.begin(), u.values.end());
  fft::transform_nd(data, g.dim(), g.points_per_axis(), false);
  detail::apply_axis_phases(g, data, detail::offset_phases(g, -1.0));
  const double scale = g.cell_volume();
  for (auto& c : data) c *= scale;
  return SpectralField{u.grid, std::move(data)};
}

inline Field inverse_transform(const SpectralField& uh) {
  const Grid& g = *uh.grid;
  std::vector<std::complex<double>> data = uh.coefficients;
  detail::apply_axis_phases(g, data, detail::offset_phases(g, 1.0));
  fft::transform_nd(data, g.dim(), g.points_per_axis(), true);
  const double scale = 1.0 / std::pow(g.box_length(), g.dim());
  Field out(uh.grid);
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = data[i].real() * scale;
  return out;
}

// sqrt(-Laplace + m^2) u through the Fourier symbol sqrt(|xi|^2 + m^2).
inline Field apply_sqrt_lap(const Field& u, double m) {
  if (m < 0.0) throw domain_error("apply_sqrt_lap: m must be >= 0");
  const Grid& g = *u.grid;
  SpectralField uh = forward_transform(u);
  for (std::size_t k = 0; k < uh.coefficients.size(); ++k) {
    const double xi = g.freq_norm(k);
    uh.coefficients[k] *= std::sqrt(xi * xi + m * m);
  }
  // Inverse with an imaginary-residue audit: the symbol is real and even, so
  // anything beyond round-off signals a symmetry bug.
  std::vector<std::complex<double>> data = uh.coefficients;
  detail::apply_axis_phases(g, data, detail::offset_phases(g, 1.0));
  fft::transform_nd(data, g.dim(), g.points_per_axis(), true);
  const double scale = 1.0 / std::pow(g.box_length(), g.dim());
  double norm2 = 0.0, imag2 = 0.0;
  Field out(u.grid);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double re = data[i].real() * scale;
    const double im = data[i].imag() * scale;
    out[i] = re;
    norm2 += re * re;
    imag2 += im * im;
  }
  if (imag2 > 1e-18 * norm2 && imag2 > 1e-280) {
    throw numeric_error("apply_sqrt_lap: imaginary residue above tolerance",
                        std::sqrt(imag2 / (norm2 + 1e-300)));
  }
  return out;
}

// sum_xi sqrt(|xi|^2+m^2) |u_hat|^2 with the L^{-N} spectral weight: the
// discrete first term of the energy (times 2).
inline double kinetic_quadratic(const Field& u, double m) {
  if (m < 0.0) throw domain_error("kinetic_quadratic: m must be >= 0");
  const Grid& g = *u.grid;
  SpectralField uh = forward_transform(u);
  double acc = 0.0;
  for (std::size_t k = 0; k < uh.coefficients.size(); ++k) {
    const double xi = g.freq_norm(k);
    acc += std::sqrt(xi * xi + m * m) * std::norm(uh.coefficients[k]);
  }
  return acc / std::pow(g.box_length(), g.dim());
}

// Gagliardo seminorm squared, via [u]^2 = (2 / C(N,1/2)) ∫ |xi| |u_hat|^2.
inline double gagliardo_sq(const Field& u) {
  const Grid& g = *u.grid;
  SpectralField uh = forward_transform(u);
  double acc = 0.0;
  for (std::size_t k = 0; k < uh.coefficients.size(); ++k) {
    acc += g.freq_norm(k) * std::norm(uh.coefficients[k]);
  }
  return 2.0 / c_n_half(g.dim()) * acc / std::pow(g.box_length(), g.dim());
}

inline double l2_inner(const Field& u, const Field& v) {
  require_same_grid(u, v, "l2_inner");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc * u.grid->cell_volume();
}

inline double lp_norm(const Field& u, double t) {
  if (t < 1.0) throw domain_error("lp_norm: exponent must be >= 1");
  double acc = 0.0;
  for (double v : u.values) acc += std::pow(std::abs(v), t);
  return std::pow(acc * u.grid->cell_volume(), 1.0 / t);
}

inline double l2_norm(const Field& u) { return std::sqrt(l2_inner(u, u)); }

}  // namespace srcq
