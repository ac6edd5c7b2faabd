#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qcs {

// Iterative radix-2 FFT, in place. Sizes are powers of two; callers pad.
// Used by the dense cross-correlation path, where exact small-integer
// coincidence counts are recovered by rounding, so double precision and a
// textbook butterfly are all that is needed.
inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft: size must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const double pi = 3.141592653589793238462643383279502884;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }

  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv;
  }
}

inline std::size_t next_pow2(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

// Full linear cross-correlation r[k] = sum_i x[i] * y[i + k] for
// k in [-(nx-1), ny-1], returned with r[0] at index nx-1.
inline std::vector<double> cross_correlate_fft(const std::vector<double>& x,
                                               const std::vector<double>& y) {
  const std::size_t nx = x.size(), ny = y.size();
  if (nx == 0 || ny == 0) return {};
  const std::size_t n = next_pow2(nx + ny - 1);

  std::vector<std::complex<double>> fx(n), fy(n);
  for (std::size_t i = 0; i < nx; ++i) fx[i] = x[i];
  for (std::size_t i = 0; i < ny; ++i) fy[i] = y[i];
  fft_radix2(fx, false);
  fft_radix2(fy, false);
  for (std::size_t i = 0; i < n; ++i) fx[i] = std::conj(fx[i]) * fy[i];
  fft_radix2(fx, true);

  // conj(X)*Y is a circular correlation; negative lags wrap to the top end.
  std::vector<double> out(nx + ny - 1);
  for (std::size_t k = 0; k < ny; ++k) out[nx - 1 + k] = fx[k].real();
  for (std::size_t k = 1; k < nx; ++k) out[nx - 1 - k] = fx[n - k].real();
  return out;
}

}  // namespace qcs
