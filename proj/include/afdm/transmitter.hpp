// transmitter.hpp - modulation chain
//
// x --prechirp--> x0 --unitary IFFT--> s0 --extended CP--> s1 --chirp--> s
//   --pulse shaping--> s_T (oversampled waveform)
//
// The chirp is applied after the cyclic prefix with signed indices, so the
// prefix samples pick up the phase of their own (negative) index. That makes
// the plain CP + chirp combination behave as a chirp-periodic prefix without
// an explicit conversion step.

#pragma once

#include <optional>

#include "afdm/core_types.hpp"
#include "afdm/fft.hpp"
#include "afdm/pulses.hpp"
#include "afdm/signal.hpp"

namespace afdm {

// Oversampled waveform on the tick grid t = u * Delta_T / oversample, with
// samples[i] holding tick u = i - origin. Tick 0 is the first data sample
// (l' = 0); prefix ticks are negative.
struct Waveform {
  cvec samples;
  int origin = 0;
  int oversample = 1;

  int lo_tick() const { return -origin; }
  int hi_tick() const { return static_cast<int>(samples.size()) - origin; }
  cplx get_tick(int u) const {
    const int i = u + origin;
    if (i < 0 || i >= static_cast<int>(samples.size())) return {0.0, 0.0};
    return samples[static_cast<std::size_t>(i)];
  }
};

// Named intermediate buffers, populated on request for stage-level testing
// and CSV dumps.
struct FrameTaps {
  cvec x;        // modulation symbols, [0, M)
  cvec x0;       // prechirped symbols, [0, M)
  cvec s0;       // time domain, [0, M)
  SignedVec s1;  // with extended CP, [-(L_D+L_W), M)
  SignedVec s;   // chirped, [-(L_D+L_W), M)
  std::optional<Waveform> waveform;  // shaped s_T at the oversampled rate
  // receive side (filled by demodulate_frame)
  SignedVec r;   // sampled baseband, [-(L_D+L_W), M)
  SignedVec r1;  // de-chirped
  SignedVec r2;  // partial prefix removed, [-D, M)
  cvec r3;       // windowed + overlap-summed, [0, M)
  cvec y0;       // DAFT-domain before de-prechirping
  cvec y;        // received symbols
};

// x0[m'] = x[m'] * exp(j 2 pi c2 m'^2)
inline cvec prechirp(const cvec& x, const Rational& c2) {
  cvec out(x.size());
  for (std::size_t m = 0; m < x.size(); ++m) {
    const double ph = frac_times(c2, static_cast<std::int64_t>(m) * static_cast<std::int64_t>(m));
    out[m] = x[m] * std::polar(1.0, 2.0 * std::numbers::pi * ph);
  }
  return out;
}

// Unitary inverse DFT.
inline cvec ifft_m(const cvec& x0) { return ifft_unitary(x0); }

// s1[l'] = s0[<l'>_M] for l' in [-(L_D+L_W), M).
inline SignedVec add_extended_cp(const cvec& s0, int L_D, int L_W) {
  const int M = static_cast<int>(s0.size());
  const int L = L_D + L_W;
  if (L >= M) throw std::invalid_argument("add_extended_cp: prefix longer than frame");
  SignedVec s1(-L, M);
  for (int l = -L; l < M; ++l) {
    const int src = l >= 0 ? l : l + M;
    s1.at(l) = s0[static_cast<std::size_t>(src)];
  }
  return s1;
}

// s[l'] = s1[l'] * exp(j 2 pi c1 l'^2), signed l'.
inline SignedVec chirp(const SignedVec& s1, const Rational& c1) {
  SignedVec out = s1;
  for (int l = s1.lo(); l < s1.hi(); ++l) {
    const double ph = frac_times(c1, static_cast<std::int64_t>(l) * static_cast<std::int64_t>(l));
    out.at(l) = s1.at(l) * std::polar(1.0, 2.0 * std::numbers::pi * ph);
  }
  return out;
}

// s_T = sum_l' s[l'] g_tx(t - Delta_T l'): zero-stuff by the oversampling
// factor, then FIR-filter with the transmit pulse taps.
inline Waveform shape_to_waveform(const SignedVec& s, const SampledPulse& tx_pulse,
                                  int oversample) {
  if (tx_pulse.oversample != oversample)
    throw RateMismatch("shape_to_waveform: pulse rate != oversample");
  Waveform w;
  w.oversample = oversample;
  const int n_taps = static_cast<int>(tx_pulse.taps.size());
  const int lo_tick = s.lo() * oversample - tx_pulse.center_index;
  const int hi_tick = (s.hi() - 1) * oversample + (n_taps - tx_pulse.center_index);
  w.origin = -lo_tick;
  w.samples.assign(static_cast<std::size_t>(hi_tick - lo_tick), cplx{0.0, 0.0});
  for (int l = s.lo(); l < s.hi(); ++l) {
    const cplx v = s.at(l);
    if (v == cplx{0.0, 0.0}) continue;
    const int base = l * oversample - tx_pulse.center_index - lo_tick;
    for (int k = 0; k < n_taps; ++k)
      w.samples[static_cast<std::size_t>(base + k)] += v * tx_pulse.taps[static_cast<std::size_t>(k)];
  }
  return w;
}

struct ModulateOptions {
  bool want_waveform = true;
};

// Runs the five transmit stages in order; x must be zero outside the
// scheduled range.
inline FrameTaps modulate_frame(const cvec& x, const ValidatedConfig& vc,
                                const SampledPulse& tx_pulse,
                                const ModulateOptions& opts = {}) {
  const GridConfig& g = vc.grid();
  if (static_cast<int>(x.size()) != g.M)
    throw std::invalid_argument("modulate_frame: x must have length M");
  FrameTaps t;
  t.x = x;
  t.x0 = prechirp(t.x, g.c2);
  t.s0 = ifft_m(t.x0);
  t.s1 = add_extended_cp(t.s0, g.L_D, g.L_W);
  t.s = chirp(t.s1, g.c1);
  if (opts.want_waveform)
    t.waveform = shape_to_waveform(t.s, tx_pulse, vc.cfg().oversample);
  return t;
}

}  // namespace afdm
