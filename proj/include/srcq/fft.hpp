#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "srcq/constants.hpp"

// Self-contained complex DFT: iterative radix-2 for power-of-two lengths,
// Bluestein's chirp-z fallback otherwise.  Sizes in this project are tiny
// (M <= 256 per axis), so no planning layer is needed.

namespace srcq {
namespace fft {

using cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

inline void radix2(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n < 2) return;
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
    const cplx wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

inline void bluestein(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cplx> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2/2 mod n kept exact via k^2 mod 2n.
    const std::size_t kk = (k * k) % (2 * n);
    const double ang = sign * kPi * static_cast<double>(kk) / static_cast<double>(n);
    chirp[k] = cplx(std::cos(ang), std::sin(ang));
  }
  std::vector<cplx> x(m, cplx(0.0, 0.0)), y(m, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
  y[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(chirp[k]);
  radix2(x, false);
  radix2(y, false);
  for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
  radix2(x, true);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * scale * chirp[k];
}

}  // namespace detail

// Unnormalized DFT: X_k = sum_j x_j e^{-2 pi i jk / n} (e^{+...} if inverse).
// The inverse carries no 1/n factor; callers own normalization.
inline void transform(std::vector<cplx>& a, bool inverse) {
  if (is_pow2(a.size())) {
    detail::radix2(a, inverse);
  } else {
    detail::bluestein(a, inverse);
  }
}

// In-place multidimensional DFT of a row-major array with extent `points`
// along each of `dim` axes.
inline void transform_nd(std::vector<cplx>& data, int dim, std::size_t points,
                         bool inverse) {
  std::size_t stride = 1;
  std::vector<cplx> line(points);
  for (int axis = dim - 1; axis >= 0; --axis) {
    const std::size_t block = stride * points;
    for (std::size_t base = 0; base < data.size(); base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (std::size_t j = 0; j < points; ++j) line[j] = data[base + off + j * stride];
        transform(line, inverse);
        for (std::size_t j = 0; j < points; ++j) data[base + off + j * stride] = line[j];
      }
    }
    stride *= points;
  }
}

}  // namespace fft
}  // namespace srcq
