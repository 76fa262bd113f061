#ifndef GFPROC_FFT_HPP_
#define GFPROC_FFT_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace gfproc {
namespace detail {

// Iterative radix-2 Cooley-Tukey; size must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>> &a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI / double(len);
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
  if (inverse)
    for (auto &x : a) x /= double(n);
}

// First n terms of the linear convolution of a and b (both length n),
// uniform-partitioned overlap-add with cached block spectra.
inline std::vector<double> convolve_prefix_fft(const std::vector<double> &a,
                                               const std::vector<double> &b,
                                               std::size_t block = 1 << 14) {
  const std::size_t n = a.size();
  if (b.size() != n) throw std::invalid_argument("convolve: length mismatch");
  const std::size_t nblocks = (n + block - 1) / block;
  const std::size_t fft_len = 2 * block;

  auto make_spectra = [&](const std::vector<double> &src) {
    std::vector<std::vector<std::complex<double>>> spectra(nblocks);
    for (std::size_t k = 0; k < nblocks; ++k) {
      auto &s = spectra[k];
      s.assign(fft_len, {0.0, 0.0});
      const std::size_t lo = k * block;
      const std::size_t hi = std::min(n, lo + block);
      for (std::size_t i = lo; i < hi; ++i) s[i - lo] = src[i];
      fft_inplace(s, false);
    }
    return spectra;
  };
  const auto sa = make_spectra(a);
  const auto sb = make_spectra(b);

  std::vector<double> out(n, 0.0);
  std::vector<std::complex<double>> acc(fft_len);
  for (std::size_t s = 0; s < nblocks; ++s) {  // output block index
    // only pairs whose output lands before n matter
    std::fill(acc.begin(), acc.end(), std::complex<double>(0.0, 0.0));
    for (std::size_t k = 0; k <= s; ++k) {
      const std::size_t j = s - k;
      const auto &x = sa[k];
      const auto &y = sb[j];
      for (std::size_t i = 0; i < fft_len; ++i) acc[i] += x[i] * y[i];
    }
    fft_inplace(acc, true);
    const std::size_t base = s * block;
    const std::size_t hi = std::min(n, base + fft_len - 1);
    for (std::size_t i = base; i < hi; ++i) out[i] += acc[i - base].real();
  }
  return out;
}

inline std::vector<double> convolve_prefix_direct(const std::vector<double> &a,
                                                  const std::vector<double> &b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw std::invalid_argument("convolve: length mismatch");
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i <= k; ++i) s += a[i] * b[k - i];
    out[k] = s;
  }
  return out;
}

}  // namespace detail
}  // namespace gfproc

#endif  // GFPROC_FFT_HPP_
