// pulses.hpp - time-domain shaping pulses
//
// Pulses are sampled on the oversampled grid (oversample ticks per Delta_T)
// and truncated to a finite half-span; values beyond the declared support are
// exactly zero, which is what makes the channel-matrix band limits exact.
// All time arguments are in units of Delta_T.

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "afdm/signal.hpp"

namespace afdm {

struct RateMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SampledPulse {
  std::vector<double> taps;  // real-symmetric shaping pulses only
  int center_index = 0;      // tap index of t = 0
  int oversample = 1;        // ticks per Delta_T ("rate" in Delta_T units)
  int halfspan = 0;          // support |t/Delta_T| <= halfspan

  // Band-limited refinement of the taps for fractional-offset evaluation.
  // Populated for pulses that get sampled off-grid (the overall pulse);
  // empty for pulses only ever used as FIR taps.
  std::vector<double> fine;
  int fine_factor = 1;  // fine grid step = 1 / (oversample * fine_factor)

  double rate() const { return static_cast<double>(oversample); }
};

namespace detail {

// Closed-form unit-energy root-raised-cosine (symbol period 1), with the
// removable singularities at t = 0 and |t| = 1/(4a) patched by their limits.
inline double rrc_value(double t, double a) {
  const double pi = std::numbers::pi;
  if (a == 0.0) {
    if (t == 0.0) return 1.0;
    return std::sin(pi * t) / (pi * t);
  }
  if (std::abs(t) < 1e-12) return 1.0 - a + 4.0 * a / pi;
  const double q = 4.0 * a * t;
  if (std::abs(std::abs(q) - 1.0) < 1e-9) {
    const double x = pi / (4.0 * a);
    return (a / std::sqrt(2.0)) *
           ((1.0 + 2.0 / pi) * std::sin(x) + (1.0 - 2.0 / pi) * std::cos(x));
  }
  return (std::sin(pi * t * (1.0 - a)) + q * std::cos(pi * t * (1.0 + a))) /
         (pi * t * (1.0 - q * q));
}

// Closed-form raised cosine (Nyquist pulse), used only as a test oracle target
// and for documentation; the simulator's overall pulse comes from convolution.
inline double rc_value(double t, double a) {
  const double pi = std::numbers::pi;
  const double s = (t == 0.0) ? 1.0 : std::sin(pi * t) / (pi * t);
  if (a == 0.0) return s;
  const double q = 2.0 * a * t;
  if (std::abs(std::abs(q) - 1.0) < 1e-9) {
    const double u = 1.0 / (2.0 * a);
    const double su = (u == 0.0) ? 1.0 : std::sin(pi * u) / (pi * u);
    return (pi / 4.0) * su;
  }
  return s * std::cos(pi * a * t) / (1.0 - q * q);
}

inline double bessel_i0_series(double x) {
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

}  // namespace detail

// Root-raised-cosine pulse truncated to +/- halfspan, normalized to unit
// discrete energy: sum |taps|^2 / oversample == 1.
inline SampledPulse make_rrc(double rolloff, int halfspan, int oversample) {
  if (rolloff < 0.0 || rolloff > 1.0) throw std::invalid_argument("make_rrc: roll-off outside [0,1]");
  if (halfspan < 1 || oversample < 1) throw std::invalid_argument("make_rrc: bad span");
  SampledPulse p;
  p.oversample = oversample;
  p.halfspan = halfspan;
  const int half_taps = halfspan * oversample;
  p.center_index = half_taps;
  p.taps.resize(2 * half_taps + 1);
  double e = 0.0;
  for (int i = -half_taps; i <= half_taps; ++i) {
    const double t = static_cast<double>(i) / oversample;
    const double g = detail::rrc_value(t, rolloff);
    p.taps[static_cast<std::size_t>(i + half_taps)] = g;
    e += g * g;
  }
  e /= oversample;
  const double s = 1.0 / std::sqrt(e);
  for (auto& x : p.taps) x *= s;
  return p;
}

// Discrete delta: identity element of the shaping cascade.
inline SampledPulse make_delta(int oversample) {
  SampledPulse p;
  p.oversample = oversample;
  p.halfspan = 0;
  p.center_index = 0;
  p.taps = {1.0};
  return p;
}

// Band-limited upsampling of the taps by `factor`, Kaiser-windowed sinc. The
// pulses here occupy a small fraction of the grid Nyquist band, so the
// refined table tracks the underlying continuous pulse to ~1e-8.
inline void refine_pulse(SampledPulse& p, int factor = 64, int kernel_halfwidth = 48,
                         double beta = 13.0) {
  if (factor <= 1 || p.taps.size() < 2) {
    p.fine = p.taps;
    p.fine_factor = 1;
    return;
  }
  p.fine_factor = factor;
  const int n = static_cast<int>(p.taps.size());
  p.fine.assign(static_cast<std::size_t>((n - 1) * factor + 1), 0.0);
  const double i0b = detail::bessel_i0_series(beta);
  auto tap = [&p, n](int i) -> double {
    return (i < 0 || i >= n) ? 0.0 : p.taps[static_cast<std::size_t>(i)];
  };
  for (int i = 0; i < n - 1; ++i) {
    for (int r = 0; r < factor; ++r) {
      const std::size_t out = static_cast<std::size_t>(i * factor + r);
      if (r == 0) {
        p.fine[out] = p.taps[static_cast<std::size_t>(i)];
        continue;
      }
      const double frac = static_cast<double>(r) / factor;
      double acc = 0.0;
      for (int j = -kernel_halfwidth + 1; j <= kernel_halfwidth; ++j) {
        const double t = static_cast<double>(j) - frac;
        const double s =
            (t == 0.0) ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
        const double u = t / kernel_halfwidth;
        const double win =
            (std::abs(u) >= 1.0) ? 0.0 : detail::bessel_i0_series(beta * std::sqrt(1.0 - u * u)) / i0b;
        acc += tap(i + j) * s * win;
      }
      p.fine[out] = acc;
    }
  }
  p.fine.back() = p.taps.back();
}

// Overall pulse g_T = (tx * rx) scaled by 1/rate so the discrete convolution
// approximates the continuous one, then normalized to g_T(0) = 1.
inline SampledPulse overall_pulse(const SampledPulse& tx, const SampledPulse& rx) {
  if (tx.oversample != rx.oversample)
    throw RateMismatch("overall_pulse: pulses sampled at different rates");
  SampledPulse g;
  g.oversample = tx.oversample;
  g.halfspan = tx.halfspan + rx.halfspan;
  const int n = static_cast<int>(tx.taps.size());
  const int m = static_cast<int>(rx.taps.size());
  g.taps.assign(static_cast<std::size_t>(n + m - 1), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) g.taps[static_cast<std::size_t>(i + j)] += tx.taps[i] * rx.taps[j];
  g.center_index = tx.center_index + rx.center_index;
  const double peak = g.taps[static_cast<std::size_t>(g.center_index)] / g.oversample;
  if (peak == 0.0) throw std::invalid_argument("overall_pulse: zero at t = 0");
  const double s = 1.0 / (g.oversample * peak);
  for (auto& x : g.taps) x *= s;
  refine_pulse(g);  // the overall pulse is the one sampled at fractional delays
  return g;
}

// Pulse value at continuous offset t = t_over_dt * Delta_T, evaluated on the
// refined grid when present (taps otherwise) with linear interpolation
// between adjacent points. Zero outside the declared support.
inline double sample_gt(const SampledPulse& p, double t_over_dt) {
  if (std::abs(t_over_dt) > p.halfspan) return 0.0;
  const bool use_fine = !p.fine.empty();
  const int factor = use_fine ? p.fine_factor : 1;
  const std::vector<double>& tbl = use_fine ? p.fine : p.taps;
  const double x = (t_over_dt * p.oversample + p.center_index) * factor;
  const int i0 = static_cast<int>(std::floor(x));
  const double f = x - i0;
  auto tap = [&tbl](int i) -> double {
    if (i < 0 || i >= static_cast<int>(tbl.size())) return 0.0;
    return tbl[static_cast<std::size_t>(i)];
  };
  return (1.0 - f) * tap(i0) + f * tap(i0 + 1);
}

}  // namespace afdm
