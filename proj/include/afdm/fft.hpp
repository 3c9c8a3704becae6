// fft.hpp - complex DFT helpers
//
// Radix-2 iterative Cooley-Tukey for power-of-two lengths, direct O(N^2)
// evaluation otherwise (only small odd sizes ever reach it). The unitary
// wrappers carry the 1/sqrt(M) convention used throughout the chain.

#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <unordered_map>

#include "afdm/signal.hpp"

namespace afdm {

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Twiddles e^{-j*2*pi*k/n} for k in [0, n/2). Cached per thread.
inline const cvec& twiddles(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<cvec>> cache;
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<cvec>(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k)
      (*slot)[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) /
                                       static_cast<double>(n));
  }
  return *slot;
}

inline void fft_pow2(cvec& a, bool inverse) {
  const std::size_t n = a.size();
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const cvec& w = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        cplx tw = w[k * step];
        if (inverse) tw = std::conj(tw);
        const cplx u = a[i + k];
        const cplx t = a[i + k + len / 2] * tw;
        a[i + k] = u + t;
        a[i + k + len / 2] = u - t;
      }
    }
  }
}

inline void dft_direct(cvec& a, bool inverse) {
  const std::size_t n = a.size();
  const double sgn = inverse ? 1.0 : -1.0;
  cvec out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc{0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = sgn * 2.0 * std::numbers::pi *
                         static_cast<double>((k * t) % n) / static_cast<double>(n);
      acc += a[t] * std::polar(1.0, ang);
    }
    out[k] = acc;
  }
  a = std::move(out);
}

}  // namespace detail

// In-place unnormalized DFT: X[k] = sum_n x[n] e^{-j*2*pi*nk/N} (conjugated
// kernel when inverse).
inline void fft_inplace(cvec& a, bool inverse = false) {
  if (a.size() < 2) return;
  if (detail::is_pow2(a.size()))
    detail::fft_pow2(a, inverse);
  else
    detail::dft_direct(a, inverse);
}

// Unitary transforms (1/sqrt(N) both ways).
inline cvec fft_unitary(cvec a) {
  fft_inplace(a, false);
  const double s = 1.0 / std::sqrt(static_cast<double>(a.size()));
  for (auto& z : a) z *= s;
  return a;
}

inline cvec ifft_unitary(cvec a) {
  fft_inplace(a, true);
  const double s = 1.0 / std::sqrt(static_cast<double>(a.size()));
  for (auto& z : a) z *= s;
  return a;
}

}  // namespace afdm
