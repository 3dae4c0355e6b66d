#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "srcq/fft.hpp"
#include "srcq/grid.hpp"
#include "srcq/nonlinearity.hpp"
#include "srcq/spectral.hpp"

// Riesz-kernel convolution (I_alpha * g)(x) = sum_y g(y) |x-y|^{-(N-alpha)} h^N
// on the periodic box, with two interchangeable paths: an exhaustive direct
// sum and a circular FFT convolution against the same kernel samples.  The
// kernel carries no dimensional prefactor.  Both paths discretize identically,
// so their agreement is a bit-level consistency check, while fidelity to R^N
// is governed by the box size.

namespace srcq {

enum class RieszMethod { direct, fft_kernel };

namespace detail {

// Cell average of |z|^{-(N-alpha)} over the cube [-h/2, h/2]^N.  Dyadic
// shells reduce the singular cube to one smooth annulus integral:
//   int_C = int_{C \ C/2} / (1 - 2^{-alpha}).
inline double origin_cell_average(int dim, double alpha, double h) {
  const double beta = dim - alpha;
  const double a = 0.5 * h;
  // 16-point Gauss-Legendre nodes on [0, 1].
  static constexpr double gl_x[8] = {
      0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
      0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
      0.9445750230732326, 0.9894009349916499};
  static constexpr double gl_w[8] = {
      0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
      0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
      0.0622535239386479, 0.0271524594117541};
  double node[16], weight[16];
  for (int i = 0; i < 8; ++i) {
    node[7 - i] = 0.5 * (1.0 - gl_x[i]);
    node[8 + i] = 0.5 * (1.0 + gl_x[i]);
    weight[7 - i] = 0.5 * gl_w[i];
    weight[8 + i] = 0.5 * gl_w[i];
  }
  // One orthant [0,a]^N minus [0,a/2]^N as 2^N - 1 boxes; each box is a
  // per-axis choice low [0,a/2] / high [a/2,a], all-low excluded.
  double annulus = 0.0;
  const int boxes = 1 << dim;
  std::vector<int> choice(dim);
  std::vector<double> z(dim);
  for (int b = 1; b < boxes; ++b) {
    for (int axisbit = 0; axisbit < dim; ++axisbit) choice[axisbit] = (b >> axisbit) & 1;
    // tensor Gauss-Legendre over the box
    std::vector<int> it(dim, 0);
    bool done = false;
    while (!done) {
      double w = 1.0;
      for (int axis = 0; axis < dim; ++axis) {
        const double lo = choice[axis] ? 0.5 * a : 0.0;
        const double len = 0.5 * a;
        z[axis] = lo + len * node[it[axis]];
        w *= len * weight[it[axis]];
      }
      double r2 = 0.0;
      for (int axis = 0; axis < dim; ++axis) r2 += z[axis] * z[axis];
      annulus += w * std::pow(r2, -0.5 * beta);
      int axis = 0;
      for (; axis < dim; ++axis) {
        if (++it[axis] < 16) break;
        it[axis] = 0;
      }
      done = axis == dim;
    }
  }
  annulus *= static_cast<double>(1 << dim);  // all orthants
  const double cube = annulus / (1.0 - std::pow(2.0, -alpha));
  return cube / std::pow(h, dim);
}

}  // namespace detail

class RieszPlan {
public:
  // truncation_radius > 0 zeroes the kernel beyond that min-image radius; a
  // synthetic device for splitting diagnostics, not part of the model
  RieszPlan(GridPtr grid, double alpha, RieszMethod method = RieszMethod::fft_kernel,
            double truncation_radius = 0.0)
      : grid_(std::move(grid)), alpha_(alpha), method_(method) {
    if (!(alpha > 0.0 && alpha < grid_->dim())) {
      throw domain_error("RieszPlan: requires 0 < alpha < N");
    }
    const int dim = grid_->dim();
    const std::size_t M = grid_->points_per_axis();
    const double h = grid_->spacing();
    const double beta = dim - alpha;
    kernel_.resize(grid_->size());
    std::size_t idx[8];
    for (std::size_t i = 0; i < kernel_.size(); ++i) {
      grid_->unravel(i, idx);
      double r2 = 0.0;
      bool at_origin = true;
      for (int a = 0; a < dim; ++a) {
        long long d = static_cast<long long>(idx[a]);
        if (d > static_cast<long long>(M) / 2) d -= static_cast<long long>(M);
        if (d != 0) at_origin = false;
        const double z = static_cast<double>(d) * h;
        r2 += z * z;
      }
      kernel_[i] = at_origin ? 0.0 : std::pow(r2, -0.5 * beta);
      if (truncation_radius > 0.0 && r2 > truncation_radius * truncation_radius) {
        kernel_[i] = 0.0;
      }
    }
    origin_cell_value_ = detail::origin_cell_average(dim, alpha, h);
    kernel_[0] = origin_cell_value_;
    if (method_ == RieszMethod::fft_kernel) {
      kernel_spectrum_.assign(kernel_.begin(), kernel_.end());
      fft::transform_nd(kernel_spectrum_, dim, M, false);
    }
  }

  const GridPtr& grid() const { return grid_; }
  double alpha() const { return alpha_; }
  RieszMethod method() const { return method_; }
  double origin_cell_value() const { return origin_cell_value_; }
  const std::vector<double>& kernel() const { return kernel_; }

  Field convolve(const Field& g) const {
    if (!g.grid || !g.grid->compatible(*grid_)) {
      throw usage_error("RieszPlan::convolve: field lives on a different grid");
    }
    return method_ == RieszMethod::direct ? convolve_direct(g) : convolve_fft(g);
  }

private:
  Field convolve_direct(const Field& g) const {
    const int dim = grid_->dim();
    const std::size_t M = grid_->points_per_axis();
    Field out(g.grid);
    std::size_t xi[8], yi[8], di[8];
    for (std::size_t i = 0; i < out.size(); ++i) {
      grid_->unravel(i, xi);
      double acc = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        grid_->unravel(j, yi);
        for (int a = 0; a < dim; ++a) di[a] = (xi[a] + M - yi[a]) % M;
        acc += g[j] * kernel_[grid_->ravel(di)];
      }
      out[i] = acc * grid_->cell_volume();
    }
    return out;
  }

  Field convolve_fft(const Field& g) const {
    const int dim = grid_->dim();
    const std::size_t M = grid_->points_per_axis();
    std::vector<std::complex<double>> data(g.values.begin(), g.values.end());
    fft::transform_nd(data, dim, M, false);
    for (std::size_t k = 0; k < data.size(); ++k) data[k] *= kernel_spectrum_[k];
    fft::transform_nd(data, dim, M, true);
    const double scale = grid_->cell_volume() / static_cast<double>(grid_->size());
    Field out(g.grid);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = data[i].real() * scale;
    return out;
  }

  GridPtr grid_;
  double alpha_;
  RieszMethod method_;
  std::vector<double> kernel_;
  std::vector<std::complex<double>> kernel_spectrum_;
  double origin_cell_value_ = 0.0;
};

// D(u) = <I_alpha * F(u), F(u)>_{L^2}; non-negative since F >= 0 and the
// kernel is positive.
inline double dd_value(const RieszPlan& plan, const Field& u,
                       const NonlinearitySpec& nl) {
  Field fu = nl.apply_F(u);
  return l2_inner(plan.convolve(fu), fu);
}

// Representing field of the first variation: D'(u) phi = <dd_gradient, phi>.
// The factor 2 comes from kernel symmetry.
inline Field dd_gradient(const RieszPlan& plan, const Field& u,
                         const NonlinearitySpec& nl) {
  Field conv = plan.convolve(nl.apply_F(u));
  Field out(u.grid);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 2.0 * conv[i] * nl.f(i, u[i]);
  }
  return out;
}

inline double dd_derivative(const RieszPlan& plan, const Field& u,
                            const NonlinearitySpec& nl, const Field& phi) {
  return l2_inner(dd_gradient(plan, u, nl), phi);
}

struct GrowthProbeReport {
  std::vector<double> scales;
  std::vector<double> values;
  double small_scale_slope = 0.0;
  double large_scale_slope = 0.0;
  bool degenerate = false;
  bool passed = false;
};

// Scaling probe of the D(u) growth bound: log-log slope >= 4 at small scale,
// <= 2p at large scale (the bound's extreme exponents).
inline GrowthProbeReport hls_growth_probe(const RieszPlan& plan,
                                          const NonlinearitySpec& nl, const Field& u,
                                          const std::vector<double>& scales,
                                          double tol = 0.1) {
  GrowthProbeReport rep;
  rep.scales = scales;
  double umax = 0.0;
  for (double v : u.values) umax = std::max(umax, std::abs(v));
  if (umax == 0.0 || scales.size() < 2) {
    rep.degenerate = true;
    return rep;
  }
  for (double s : scales) rep.values.push_back(dd_value(plan, s * u, nl));
  auto slope = [&](std::size_t i) {
    return std::log(rep.values[i + 1] / rep.values[i]) /
           std::log(scales[i + 1] / scales[i]);
  };
  rep.small_scale_slope = slope(0);
  rep.large_scale_slope = slope(scales.size() - 2);
  rep.passed = rep.small_scale_slope >= 4.0 - tol &&
               rep.large_scale_slope <= 2.0 * nl.p() + tol;
  return rep;
}

}  // namespace srcq
