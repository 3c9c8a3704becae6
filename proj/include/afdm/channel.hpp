// channel.hpp - doubly-selective multipath channel
//
// Two application backends:
//  * apply_waveform_channel works on the oversampled waveform with
//    band-limited fractional delays and a narrowband Doppler phase; this is
//    the physical model (up to the usual linear-delay assumption).
//  * apply_discrete_channel is the exact sampled-domain model with the
//    overall pulse g_T and per-path band limits floor(l_p)-L_T/2 ..
//    ceil(l_p)+L_T/2; it is the model the channel matrix is built from, so
//    chain-vs-matrix comparisons are exact.
//
// Doppler phase origin is the first data sample (l = 0): prefix samples carry
// negative-phase Doppler, consistent with the signed-index chirps.

#pragma once

#include <cmath>
#include <fstream>
#include <sstream>

#include "afdm/core_types.hpp"
#include "afdm/pulses.hpp"
#include "afdm/rng.hpp"
#include "afdm/signal.hpp"
#include "afdm/transmitter.hpp"

namespace afdm {

struct ChannelPath {
  cplx h{0.0, 0.0};   // complex gain
  double ell = 0.0;   // normalized delay, samples (fractional)
  double k = 0.0;     // normalized Doppler, subcarrier units (fractional)
};

struct ChannelRealization {
  std::vector<ChannelPath> paths;
  ChannelGenParams params;
};

struct IndexOutOfSupport : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// h_p ~ CN(0, gain_variance), ell_p ~ U[delay_low, delay_high],
// k_p = K_max cos(theta_p) with theta_p ~ U[0, 2 pi). Deterministic per seed.
inline ChannelRealization draw_channel(const ChannelGenParams& params, Rng& rng) {
  ChannelRealization r;
  r.params = params;
  r.paths.resize(static_cast<std::size_t>(params.P));
  for (auto& p : r.paths) {
    p.h = rng.cgauss(params.gain_variance);
    p.ell = rng.uniform(params.delay_low, params.delay_high);
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    p.k = params.K_max * std::cos(theta);
  }
  return r;
}

namespace detail {

// Kaiser-windowed sinc kernel for band-limited fractional delay on the
// oversampled grid. Signals here occupy a small fraction of the oversampled
// Nyquist band, so the kernel's passband deviation is far below the
// cross-backend tolerances.
inline double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

inline std::vector<double> frac_delay_kernel(double frac, int halfwidth, double beta = 14.0) {
  std::vector<double> k(static_cast<std::size_t>(2 * halfwidth));
  const double i0b = bessel_i0(beta);
  for (int j = -halfwidth + 1; j <= halfwidth; ++j) {
    const double t = static_cast<double>(j) - frac;
    const double s = (t == 0.0) ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
    const double u = t / halfwidth;
    const double win = (std::abs(u) >= 1.0) ? 0.0 : bessel_i0(beta * std::sqrt(1.0 - u * u)) / i0b;
    k[static_cast<std::size_t>(j + halfwidth - 1)] = s * win;
  }
  return k;
}

}  // namespace detail

struct WaveformChannelParams {
  int sinc_halfwidth = 64;  // oversampled taps each side for fractional delay
};

// out(t) = sum_p h_p in(t - tau_p) exp(j 2 pi nu_p t); tau_p = ell_p * Delta_T
// realized as an integer tick shift plus windowed-sinc interpolation.
inline Waveform apply_waveform_channel(const Waveform& in, const ChannelRealization& chan,
                                       int M, const WaveformChannelParams& wp = {}) {
  const int os = in.oversample;
  Waveform out;
  out.oversample = os;
  out.origin = in.origin;
  double max_delay_ticks = 0.0;
  for (const auto& p : chan.paths) max_delay_ticks = std::max(max_delay_ticks, p.ell * os);
  const int extra = static_cast<int>(std::ceil(max_delay_ticks)) + wp.sinc_halfwidth + 1;
  out.samples.assign(in.samples.size() + static_cast<std::size_t>(extra), cplx{0.0, 0.0});

  const double dopp_base = 2.0 * std::numbers::pi / (static_cast<double>(M) * os);
  for (const auto& p : chan.paths) {
    if (p.h == cplx{0.0, 0.0}) continue;
    const double d = p.ell * os;
    const int n0 = static_cast<int>(std::floor(d));
    const double frac = d - n0;
    const int lo = in.lo_tick();
    const int hi = in.hi_tick();
    if (frac == 0.0) {
      for (int u = lo + n0; u < hi + n0; ++u) {
        const cplx ph = std::polar(1.0, dopp_base * p.k * static_cast<double>(u));
        out.samples[static_cast<std::size_t>(u + out.origin)] += p.h * ph * in.get_tick(u - n0);
      }
      continue;
    }
    const auto kern = detail::frac_delay_kernel(frac, wp.sinc_halfwidth);
    const int kh = wp.sinc_halfwidth;
    // in(u - n0 - frac) = sum_j in[u - n0 - j] * kern(j - frac)
    for (int u = lo + n0 - kh; u < hi + n0 + kh; ++u) {
      cplx acc{0.0, 0.0};
      for (int j = -kh + 1; j <= kh; ++j)
        acc += in.get_tick(u - n0 - j) * kern[static_cast<std::size_t>(j + kh - 1)];
      if (acc == cplx{0.0, 0.0}) continue;
      const int idx = u + out.origin;
      if (idx < 0 || idx >= static_cast<int>(out.samples.size())) continue;
      const cplx ph = std::polar(1.0, dopp_base * p.k * static_cast<double>(u));
      out.samples[static_cast<std::size_t>(idx)] += p.h * ph * acc;
    }
  }
  return out;
}

// Exact discrete model on the baseband grid:
//   r[l] = sum_p sum_{l''} s[l - l''] g_T(Delta_T (l'' - ell_p)) h_p
//          exp(j 2 pi k_p l / M),
// with l'' in [floor(ell_p) - halfspan, ceil(ell_p) + halfspan] and s
// zero-extended outside its support (an isolated frame has no predecessor).
inline SignedVec apply_discrete_channel(const SignedVec& s, const ChannelRealization& chan,
                                        const SampledPulse& g_t, const GridConfig& grid,
                                        int band_halfspan) {
  SignedVec r(s.lo(), s.hi());
  const int M = grid.M;
  for (const auto& p : chan.paths) {
    if (std::floor(p.ell) - band_halfspan < 0)
      throw IndexOutOfSupport("apply_discrete_channel: pulse band reaches before the frame start");
    const int b_lo = static_cast<int>(std::floor(p.ell)) - band_halfspan;
    const int b_hi = static_cast<int>(std::ceil(p.ell)) + band_halfspan;
    std::vector<double> gt_vals(static_cast<std::size_t>(b_hi - b_lo + 1));
    for (int b = b_lo; b <= b_hi; ++b)
      gt_vals[static_cast<std::size_t>(b - b_lo)] = sample_gt(g_t, static_cast<double>(b) - p.ell);
    for (int l = r.lo(); l < r.hi(); ++l) {
      cplx acc{0.0, 0.0};
      for (int b = b_lo; b <= b_hi; ++b) {
        const double gv = gt_vals[static_cast<std::size_t>(b - b_lo)];
        if (gv == 0.0) continue;
        acc += gv * s.get(l - b);
      }
      const double ph = 2.0 * std::numbers::pi * p.k * static_cast<double>(l) / M;
      r.at(l) += p.h * std::polar(1.0, ph) * acc;
    }
  }
  return r;
}

// Adds i.i.d. circular complex Gaussian noise, variance sigma2 per sample.
inline SignedVec add_noise(const SignedVec& r, double sigma2, Rng& rng) {
  if (sigma2 < 0) throw std::invalid_argument("add_noise: negative variance");
  SignedVec out = r;
  if (sigma2 == 0.0) return out;
  for (auto& z : out.v) z += rng.cgauss(sigma2);
  return out;
}

// CSV round-trip so identical channels can be replayed across modes.
inline void save_channel_csv(const ChannelRealization& chan, std::ostream& os) {
  os << "p,re_h,im_h,ell,k\n";
  char buf[160];
  for (std::size_t i = 0; i < chan.paths.size(); ++i) {
    const auto& p = chan.paths[i];
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g\n", i, p.h.real(), p.h.imag(),
                  p.ell, p.k);
    os << buf;
  }
}

inline ChannelRealization load_channel_csv(std::istream& is) {
  ChannelRealization chan;
  std::string line;
  if (!std::getline(is, line) || line.rfind("p,", 0) != 0)
    throw std::runtime_error("load_channel_csv: missing header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (vals.size() != 5) throw std::runtime_error("load_channel_csv: bad row");
    ChannelPath p;
    p.h = {vals[1], vals[2]};
    p.ell = vals[3];
    p.k = vals[4];
    chan.paths.push_back(p);
  }
  chan.params.P = static_cast<int>(chan.paths.size());
  return chan;
}

}  // namespace afdm
