// receiver.hpp - demodulation chain in three modes
//
// os-ps:         de-chirp -> remove L_R prefix samples -> window on [-D, M)
//                + overlap-summation -> unitary FFT -> de-prechirp
// direct-window: same chain with D = 0 (full prefix removed) and a
//                multiplicative window on [0, M); no fold happens.
// plain:         D = 0 with an all-ones window.
//
// With the window support tied to the grid overlap D, all three modes are the
// same code path; window_overlap_sum degenerates to a plain multiply at D = 0.

#pragma once

#include "afdm/channel.hpp"
#include "afdm/core_types.hpp"
#include "afdm/fft.hpp"
#include "afdm/pulses.hpp"
#include "afdm/signal.hpp"
#include "afdm/transmitter.hpp"
#include "afdm/windows.hpp"

namespace afdm {

struct AlignmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SupportMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ReceiveMode {
  RxMode kind = RxMode::kOsPs;
  Window window;  // ignored for plain (an all-ones window is used)
};

// Convolve with the receive pulse, compensate the aggregate filter delay, and
// decimate to the baseband grid [-(L_D+L_W), M). `mf_scale` is the matched
// filter gain that makes the cascade equal the normalized overall pulse
// (1 / (oversample * g_raw(0)) for a tx/rx pair; 1 for delta pulses).
inline SignedVec matched_filter_and_sample(const Waveform& wav, const SampledPulse& rx_pulse,
                                           const GridConfig& grid, double mf_scale) {
  if (rx_pulse.oversample != wav.oversample)
    throw AlignmentError("matched_filter_and_sample: pulse rate != waveform rate");
  const int os = wav.oversample;
  const int L = grid.prefix_len();
  SignedVec r(-L, grid.M);
  const int n_taps = static_cast<int>(rx_pulse.taps.size());
  for (int l = -L; l < grid.M; ++l) {
    // r(t)|_{t = l Delta_T} = sum_k rx[k] wav(l*os - (k - center))
    const int base = l * os + rx_pulse.center_index;
    cplx acc{0.0, 0.0};
    for (int k = 0; k < n_taps; ++k)
      acc += rx_pulse.taps[static_cast<std::size_t>(k)] * wav.get_tick(base - k);
    r.at(l) = acc * mf_scale;
  }
  return r;
}

// r1[l] = r[l] * exp(-j 2 pi c1 l^2), exact inverse of the transmit chirp.
inline SignedVec dechirp(const SignedVec& r, const Rational& c1) {
  SignedVec out = r;
  for (int l = r.lo(); l < r.hi(); ++l) {
    const double ph = frac_times(c1, static_cast<std::int64_t>(l) * static_cast<std::int64_t>(l));
    out.at(l) = r.at(l) * std::polar(1.0, -2.0 * std::numbers::pi * ph);
  }
  return out;
}

// Drops the first L_R samples; remaining range [-(L_D+L_W-L_R), M).
inline SignedVec remove_partial_prefix(const SignedVec& r1, int L_R) {
  const int new_lo = r1.lo() + L_R;
  if (L_R < 0 || new_lo > 0)
    throw std::invalid_argument("remove_partial_prefix: L_R outside [0, L_D+L_W]");
  SignedVec out(new_lo, r1.hi());
  for (int l = new_lo; l < r1.hi(); ++l) out.at(l) = r1.at(l);
  return out;
}

// r3[l] = W[l] r2[l] + W[l-M] r2[l-M] for l in [0, M). The second term is
// non-zero only on the last D samples, where the retained prefix folds onto
// the frame tail.
inline cvec window_overlap_sum(const SignedVec& r2, const Window& w) {
  const int M = w.M;
  if (r2.lo() != -w.D || r2.hi() != M)
    throw SupportMismatch("window_overlap_sum: window support does not match signal range");
  cvec r3(static_cast<std::size_t>(M));
  for (int l = 0; l < M; ++l) {
    cplx v = w.at(l) * r2.get(l);
    if (l - M >= -w.D) v += w.at(l - M) * r2.get(l - M);
    r3[static_cast<std::size_t>(l)] = v;
  }
  return r3;
}

// Unitary forward DFT into the DAFT domain.
inline cvec fft_m(const cvec& r3) { return fft_unitary(r3); }

// y[m] = y0[m] * exp(-j 2 pi c2 m^2)
inline cvec deprechirp(const cvec& y0, const Rational& c2) {
  cvec out(y0.size());
  for (std::size_t m = 0; m < y0.size(); ++m) {
    const double ph = frac_times(c2, static_cast<std::int64_t>(m) * static_cast<std::int64_t>(m));
    out[m] = y0[m] * std::polar(1.0, -2.0 * std::numbers::pi * ph);
  }
  return out;
}

struct DemodulateOptions {
  bool keep_taps = false;
};

// Runs the receive chain on the sampled baseband signal r (range
// [-(L_D+L_W), M)). The mode's window must live on [-D, M) for os-ps and on
// [0, M) for direct-window/plain.
inline cvec demodulate_frame(const SignedVec& received, const ReceiveMode& mode,
                             const ValidatedConfig& vc, FrameTaps* taps = nullptr) {
  const GridConfig& g = vc.grid();
  const Window* w = &mode.window;
  Window ones;
  if (mode.kind == RxMode::kPlain) {
    ones = make_rectangular_window(g.M);
    w = &ones;
  }
  const int want_D = (mode.kind == RxMode::kOsPs) ? g.overlap() : 0;
  if (w->M != g.M || w->D != want_D)
    throw SupportMismatch("demodulate_frame: window support does not match mode/grid");

  SignedVec r1 = dechirp(received, g.c1);
  SignedVec r2 = remove_partial_prefix(r1, g.prefix_len() - want_D);
  cvec r3 = window_overlap_sum(r2, *w);
  cvec y0 = fft_m(r3);
  cvec y = deprechirp(y0, g.c2);
  if (taps) {
    taps->r = received;
    taps->r1 = std::move(r1);
    taps->r2 = std::move(r2);
    taps->r3 = std::move(r3);
    taps->y0 = std::move(y0);
    taps->y = y;
  }
  return y;
}

}  // namespace afdm
