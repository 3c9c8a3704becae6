// link.hpp - per-configuration assembly of pulses, windows and frame helpers
//
// PulseSet ties the transmit/receive pulses to the overall pulse and the
// matched-filter gain. With unit-energy RRC pulses the raw cascade gain
// conv(tx, rx)(0)/oversample is 1 only up to truncation; mf_scale absorbs the
// exact factor so the waveform path and the discrete g_T path share one
// normalization (g_T(0) = 1).

#pragma once

#include "afdm/channel.hpp"
#include "afdm/core_types.hpp"
#include "afdm/pulses.hpp"
#include "afdm/receiver.hpp"
#include "afdm/transmitter.hpp"
#include "afdm/windows.hpp"

namespace afdm {

struct PulseSet {
  SampledPulse tx;
  SampledPulse rx;
  SampledPulse gt;  // overall pulse, g_T(0) = 1
  double mf_scale = 1.0;

  static PulseSet rrc_pair(double rolloff, int halfspan, int oversample) {
    PulseSet ps;
    ps.tx = make_rrc(rolloff, halfspan, oversample);
    ps.rx = ps.tx;  // matched filter
    ps.gt = overall_pulse(ps.tx, ps.rx);
    ps.mf_scale = raw_gain_inverse(ps.tx, ps.rx);
    return ps;
  }

  static PulseSet delta_pair(int oversample) {
    PulseSet ps;
    ps.tx = make_delta(oversample);
    ps.rx = ps.tx;
    ps.gt = overall_pulse(ps.tx, ps.rx);
    ps.mf_scale = raw_gain_inverse(ps.tx, ps.rx);
    return ps;
  }

  // The rx FIR output decimated at baseband ticks is sum_l' s[l'] *
  // conv(tx,rx)((l-l') ticks); dividing by conv(tx,rx)(0) lands on the
  // normalized overall pulse g_T(0) = 1.
  static double raw_gain_inverse(const SampledPulse& tx, const SampledPulse& rx) {
    double g0 = 0.0;
    const int c = tx.center_index + rx.center_index;
    const int n = static_cast<int>(tx.taps.size());
    for (int i = 0; i < n; ++i) {
      const int j = c - i;
      if (j >= 0 && j < static_cast<int>(rx.taps.size()))
        g0 += tx.taps[static_cast<std::size_t>(i)] * rx.taps[static_cast<std::size_t>(j)];
    }
    return 1.0 / g0;
  }
};

// Everything a frame-level simulation needs, derived once from a validated
// config.
struct LinkContext {
  ValidatedConfig vc;
  PulseSet pulses;
  Window window;      // receive window for vc.cfg().mode
  ReceiveMode mode;

  explicit LinkContext(const ValidatedConfig& v)
      : vc(v),
        pulses(PulseSet::rrc_pair(v.cfg().pulse_rolloff, v.cfg().filter_halfspan,
                                  v.cfg().oversample)) {
    set_mode(v.cfg().mode, v.cfg().window_kind);
  }

  // direct-window and plain remove the full prefix, so their windows live on
  // [0, M); os-ps windows span [-D, M) with D from the grid.
  void set_mode(RxMode m, WindowKind kind) {
    const GridConfig& g = vc.grid();
    switch (m) {
      case RxMode::kOsPs:
        if (kind == WindowKind::kRaisedCosine) {
          window = make_rc_window(g);
        } else if (kind == WindowKind::kChebyshev) {
          window = make_chebyshev_window(g.M + g.overlap(), vc.cfg().cheb_atten_db);
          window.M = g.M;
          window.D = g.overlap();
        } else {
          window = make_rectangular_window(g.M + g.overlap());
          window.M = g.M;
          window.D = g.overlap();
        }
        break;
      case RxMode::kDirectWindow:
        window = (kind == WindowKind::kRectangular)
                     ? make_rectangular_window(g.M)
                     : make_chebyshev_window(g.M, vc.cfg().cheb_atten_db);
        break;
      case RxMode::kPlain:
        window = make_rectangular_window(g.M);
        break;
    }
    mode.kind = m;
    mode.window = window;
  }

  // Noiseless frame through the exact discrete channel.
  cvec run_frame(const cvec& x, const ChannelRealization& chan, FrameTaps* taps = nullptr) const {
    FrameTaps t = modulate_frame(x, vc, pulses.tx, {.want_waveform = false});
    SignedVec r = apply_discrete_channel(t.s, chan, pulses.gt, vc.grid(),
                                         vc.cfg().filter_halfspan);
    cvec y = demodulate_frame(r, mode, vc, taps);
    if (taps) {
      taps->x = std::move(t.x);
      taps->x0 = std::move(t.x0);
      taps->s0 = std::move(t.s0);
      taps->s1 = std::move(t.s1);
      taps->s = std::move(t.s);
    }
    return y;
  }
};

}  // namespace afdm
