#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "srcq/constants.hpp"
#include "srcq/errors.hpp"

namespace srcq {

// Uniform periodic box [-L/2, L/2)^N with M points per axis.  Nodes sit at
// cell centers, x = (k + 1/2) h - L/2, so no node touches the origin and the
// Coulomb factor 1/|x| is finite everywhere.
class Grid {
public:
  Grid(int dim, std::size_t points_per_axis, double box_length)
      : dim_(dim), points_(points_per_axis), length_(box_length) {
    if (dim < 2) throw domain_error("Grid: dim must be >= 2");
    if (points_ < 2) throw domain_error("Grid: need at least 2 points per axis");
    if (!(box_length > 0.0)) throw domain_error("Grid: box_length must be positive");
    spacing_ = length_ / static_cast<double>(points_);
    size_ = 1;
    for (int a = 0; a < dim_; ++a) size_ *= points_;
  }

  int dim() const { return dim_; }
  std::size_t points_per_axis() const { return points_; }
  double box_length() const { return length_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return size_; }

  // Quadrature weight h^N of one cell.
  double cell_volume() const { return std::pow(spacing_, dim_); }

  // Node coordinate along one axis.
  double coord(std::size_t index) const {
    return (static_cast<double>(index) + 0.5) * spacing_ - 0.5 * length_;
  }

  // Frequency xi = 2 pi k / L with k in {-M/2, ..., M/2-1} in FFT order.
  double freq(std::size_t index) const {
    const long long half = static_cast<long long>(points_) / 2;
    long long k = static_cast<long long>(index);
    if (k >= half + static_cast<long long>(points_) % 2) k -= static_cast<long long>(points_);
    return 2.0 * kPi * static_cast<double>(k) / length_;
  }

  void unravel(std::size_t flat, std::size_t* idx) const {
    for (int a = dim_ - 1; a >= 0; --a) {
      idx[a] = flat % points_;
      flat /= points_;
    }
  }

  std::size_t ravel(const std::size_t* idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim_; ++a) flat = flat * points_ + idx[a];
    return flat;
  }

  void coords(std::size_t flat, double* x) const {
    std::size_t idx[8];
    unravel(flat, idx);
    for (int a = 0; a < dim_; ++a) x[a] = coord(idx[a]);
  }

  double radius(std::size_t flat) const {
    double x[8];
    coords(flat, x);
    double s = 0.0;
    for (int a = 0; a < dim_; ++a) s += x[a] * x[a];
    return std::sqrt(s);
  }

  // |xi| of a flat spectral index.
  double freq_norm(std::size_t flat) const {
    std::size_t idx[8];
    unravel(flat, idx);
    double s = 0.0;
    for (int a = 0; a < dim_; ++a) {
      const double f = freq(idx[a]);
      s += f * f;
    }
    return std::sqrt(s);
  }

  bool compatible(const Grid& other) const {
    return dim_ == other.dim_ && points_ == other.points_ && length_ == other.length_;
  }

private:
  int dim_;
  std::size_t points_;
  double length_;
  double spacing_;
  std::size_t size_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(int dim, std::size_t points, double box_length) {
  return std::make_shared<const Grid>(dim, points, box_length);
}

// Real-valued samples on a Grid.
struct Field {
  GridPtr grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(GridPtr g, double fill = 0.0)
      : grid(std::move(g)), values(grid->size(), fill) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

// Complex Fourier coefficients in FFT index order.
struct SpectralField {
  GridPtr grid;
  std::vector<std::complex<double>> coefficients;
};

inline void require_same_grid(const Field& u, const Field& v, const char* where) {
  if (!u.grid || !v.grid || !u.grid->compatible(*v.grid)) {
    throw usage_error(std::string(where) + ": fields live on different grids");
  }
}

// Pointwise helpers used throughout.
inline Field operator+(const Field& u, const Field& v) {
  require_same_grid(u, v, "Field+");
  Field out = u;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
  return out;
}

inline Field operator-(const Field& u, const Field& v) {
  require_same_grid(u, v, "Field-");
  Field out = u;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= v[i];
  return out;
}

inline Field operator*(double s, const Field& u) {
  Field out = u;
  for (double& v : out.values) v *= s;
  return out;
}

inline void axpy(double s, const Field& x, Field& y) {
  require_same_grid(x, y, "axpy");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
}

}  // namespace srcq
