#pragma once

#include <complex>
#include <vector>

#include "rearr/errors.hpp"

namespace rearr {

// In-place iterative radix-2 Cooley-Tukey, forward transform
// X_k = sum_j x_j exp(-2 pi i jk / n).  n must be a power of two.
// Twiddles come from std::polar per butterfly; slower than a table but
// keeps rounding error flat, which the circulant eigenvalue check needs.
inline void fft_inplace(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw DomainError("fft size must be a nonzero power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double two_pi = 6.283185307179586476925286766559;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -two_pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> w = std::polar(1.0, ang * static_cast<double>(k));
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

}  // namespace rearr
