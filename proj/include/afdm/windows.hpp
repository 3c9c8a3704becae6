// windows.hpp - receive shaping windows and their DTFT g_W
//
// A Window lives on the signed support [-D, M): the first D values weight the
// retained prefix region that the overlap-summation folds onto the tail. The
// raised-cosine window satisfies W[l] + W[l-M] = 1 on [0, M) exactly, which is
// what makes the fold transparent for periodic inputs. g_W is periodic in
// f/Delta_F with period M, so a single evaluation at the raw real-valued
// argument already accounts for wrap-around at the band edge.

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "afdm/core_types.hpp"
#include "afdm/fft.hpp"
#include "afdm/signal.hpp"

namespace afdm {

struct Window {
  std::vector<double> values;  // values[i] <-> l = i - D, support [-D, M)
  int D = 0;
  int M = 0;
  WindowKind kind = WindowKind::kRectangular;

  double at(int l) const {
    if (l < -D || l >= M) return 0.0;
    return values[static_cast<std::size_t>(l + D)];
  }
  int length() const { return M + D; }
};

// Raised-cosine (Nyquist) window on [-D, M) with roll-off alpha_W = D/M:
// flat 1 for |l - (M-D)/2| <= (1-alpha_W)M/2, cos^2 taper otherwise.
inline Window make_rc_window(const GridConfig& grid) {
  const int M = grid.M;
  const int D = grid.overlap();
  if (D < 0) throw std::invalid_argument("make_rc_window: negative overlap");
  Window w;
  w.M = M;
  w.D = D;
  w.kind = WindowKind::kRaisedCosine;
  w.values.resize(static_cast<std::size_t>(M + D));
  if (D == 0) {
    std::fill(w.values.begin(), w.values.end(), 1.0);
    return w;
  }
  const double center = 0.5 * (M - D);
  const double flat = 0.5 * (M - D);  // (1 - alpha_W) * M / 2 with alpha_W = D/M
  for (int l = -D; l < M; ++l) {
    const double u = std::abs(l - center);
    double v = 1.0;
    if (u > flat) {
      const double c = std::cos(std::numbers::pi / (2.0 * D) * (u - flat));
      v = c * c;
    }
    w.values[static_cast<std::size_t>(l + D)] = v;
  }
  return w;
}

inline Window make_rectangular_window(int M) {
  Window w;
  w.M = M;
  w.D = 0;
  w.kind = WindowKind::kRectangular;
  w.values.assign(static_cast<std::size_t>(M), 1.0);
  return w;
}

namespace detail {

// Chebyshev polynomial T_n(x) extended off [-1, 1].
inline double cheb_t(int n, double x) {
  if (x > 1.0) return std::cosh(n * std::acosh(x));
  if (x < -1.0) {
    const double v = std::cosh(n * std::acosh(-x));
    return (n % 2 == 0) ? v : -v;
  }
  return std::cos(n * std::acos(x));
}

}  // namespace detail

// Dolph-Chebyshev window with the given sidelobe attenuation, peak normalized
// to 1, on support [0, M) (D = 0: the direct-windowing baseline multiplies the
// data portion only).
inline Window make_chebyshev_window(int length, double atten_db) {
  if (length < 2) throw std::invalid_argument("make_chebyshev_window: length must be >= 2");
  if (atten_db <= 0) throw std::invalid_argument("make_chebyshev_window: attenuation must be positive");
  const int N = length;
  const double r = std::pow(10.0, atten_db / 20.0);
  const double x0 = std::cosh(std::acosh(r) / (N - 1));
  std::vector<double> A(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k)
    A[static_cast<std::size_t>(k)] =
        detail::cheb_t(N - 1, x0 * std::cos(std::numbers::pi * k / N));
  // Inverse DFT with the linear phase that centers the window at (N-1)/2.
  // The pairing (k, N-k) keeps the sum real for both parities of N.
  Window w;
  w.M = N;
  w.D = 0;
  w.kind = WindowKind::kChebyshev;
  w.values.resize(static_cast<std::size_t>(N));
  double peak = 0.0;
  for (int n = 0; n < N; ++n) {
    double acc = 0.0;
    for (int k = 0; k < N; ++k) {
      const double ang =
          2.0 * std::numbers::pi * k * (n - 0.5 * (N - 1)) / static_cast<double>(N);
      acc += A[static_cast<std::size_t>(k)] * std::cos(ang);
    }
    w.values[static_cast<std::size_t>(n)] = acc;
    peak = std::max(peak, std::abs(acc));
  }
  for (auto& v : w.values) v /= peak;
  return w;
}

inline Window make_window(const GridConfig& grid, WindowKind kind, double cheb_atten_db = 60.0) {
  switch (kind) {
    case WindowKind::kRaisedCosine: return make_rc_window(grid);
    case WindowKind::kChebyshev: return make_chebyshev_window(grid.M, cheb_atten_db);
    case WindowKind::kRectangular: return make_rectangular_window(grid.M);
  }
  throw std::invalid_argument("make_window: unknown kind");
}

// g_W(f) = (1/M) sum_{l=-D}^{M-1} W[l] exp(-j 2 pi (f/M) l), with f in units
// of Delta_F. Evaluated as a Horner polynomial in z = e^{-j 2 pi f / M}; one
// trig call instead of M+D of them.
inline cplx eval_gw(const Window& w, double f_over_df, int M) {
  const int D = w.D;
  const double ang = -2.0 * std::numbers::pi * f_over_df / static_cast<double>(M);
  const cplx z = std::polar(1.0, ang);
  cplx acc{0.0, 0.0};
  for (int i = static_cast<int>(w.values.size()) - 1; i >= 0; --i)
    acc = acc * z + w.values[static_cast<std::size_t>(i)];
  // undo the index offset: values[i] sits at l = i - D
  acc *= std::polar(1.0, -ang * static_cast<double>(D));
  return acc / static_cast<double>(M);
}

// One period of g_W on an integer-offset comb: returns g_W(n + phi) for
// n = 0..M-1 in one length-M DFT of the time-aliased, phase-modulated window.
// Exact (it is the same sum as eval_gw, reordered); used by the channel-matrix
// builder where g_W is needed at integer-spaced arguments.
inline cvec gw_comb(const Window& w, int M, double phi) {
  cvec folded(static_cast<std::size_t>(M), cplx{0.0, 0.0});
  const double base = -2.0 * std::numbers::pi * phi / static_cast<double>(M);
  for (int l = -w.D; l < M; ++l) {
    const double v = w.at(l);
    if (v == 0.0) continue;
    // The DFT kernel e^{-j 2 pi n l / M} is M-periodic in l for integer n, so
    // time-aliasing the prefix region onto [0, M) is exact as long as the
    // fractional-offset modulation keeps the signed index.
    const cplx mod = std::polar(1.0, base * static_cast<double>(l));
    folded[static_cast<std::size_t>(l >= 0 ? l : l + M)] += v * mod;
  }
  fft_inplace(folded, false);
  const double s = 1.0 / static_cast<double>(M);
  for (auto& z : folded) z *= s;
  return folded;
}

}  // namespace afdm
