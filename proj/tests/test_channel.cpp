#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "afdm/channel.hpp"
#include "afdm/link.hpp"
#include "afdm/receiver.hpp"

using namespace afdm;

namespace {

cvec random_frame(int M, Rng& rng) {
  cvec x(static_cast<std::size_t>(M));
  for (auto& z : x) z = rng.cgauss();
  return x;
}

ExperimentConfig chain_config(int M, int halfspan) {
  ExperimentConfig c;
  c.grid.M = M;
  c.grid.L_D = 3 * halfspan;
  c.grid.L_W = 0;
  c.grid.L_R = 3 * halfspan;
  c.grid.c1 = compute_c1(3, 4, M);
  c.grid.schd_lo = 0;
  c.grid.schd_hi = M / 4;
  c.chan.P = 3;
  c.chan.K_max = 3.0;
  c.chan.delay_low = halfspan;
  c.chan.delay_high = 2.0 * halfspan;
  c.chan.gain_variance = 1.0 / 3.0;
  c.filter_halfspan = halfspan;
  c.oversample = 8;
  return c;
}

// waveform backend: shape -> channel -> matched filter -> sample
SignedVec via_waveform(const ValidatedConfig& vc, const PulseSet& ps, const cvec& x,
                       const ChannelRealization& chan) {
  FrameTaps t = modulate_frame(x, vc, ps.tx);
  Waveform rx_wave = apply_waveform_channel(*t.waveform, chan, vc.grid().M);
  return matched_filter_and_sample(rx_wave, ps.rx, vc.grid(), ps.mf_scale);
}

// discrete backend on the same frame
SignedVec via_discrete(const ValidatedConfig& vc, const PulseSet& ps, const cvec& x,
                       const ChannelRealization& chan) {
  FrameTaps t = modulate_frame(x, vc, ps.tx, {.want_waveform = false});
  return apply_discrete_channel(t.s, chan, ps.gt, vc.grid(), vc.cfg().filter_halfspan);
}

}  // namespace

TEST_CASE("draw_channel: distribution bounds and determinism") {
  ChannelGenParams p;
  p.P = 10;
  p.K_max = 3.0;
  p.delay_low = 16.0;
  p.delay_high = 26.0;
  p.gain_variance = 0.1;

  Rng a(42), b(42), c(43);
  const auto ra = draw_channel(p, a);
  const auto rb = draw_channel(p, b);
  const auto rc = draw_channel(p, c);
  REQUIRE(ra.paths.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(std::abs(ra.paths[i].k) <= 3.0);
    CHECK(ra.paths[i].ell >= 16.0);
    CHECK(ra.paths[i].ell <= 26.0);
    CHECK(ra.paths[i].h == rb.paths[i].h);  // same seed, same draw
    CHECK(ra.paths[i].ell == rb.paths[i].ell);
  }
  bool differs = false;
  for (std::size_t i = 0; i < 10; ++i)
    if (ra.paths[i].h != rc.paths[i].h) differs = true;
  CHECK(differs);
}

TEST_CASE("draw_channel: mean total path power is 1") {
  ChannelGenParams p;
  p.P = 10;
  p.gain_variance = 0.1;
  p.delay_low = 16.0;
  p.delay_high = 26.0;
  Rng rng(7);
  double total = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto r = draw_channel(p, rng);
    for (const auto& path : r.paths) total += std::norm(path.h);
  }
  CHECK(total / draws == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("apply_waveform_channel: integer delays shift, zero gains vanish") {
  Rng rng(5);
  Waveform in;
  in.oversample = 8;
  in.origin = 16;
  in.samples = random_frame(128, rng);

  ChannelRealization chan;
  chan.paths.push_back({cplx{1.0, 0.0}, 2.0, 0.0});  // 2 samples = 16 ticks
  Waveform out = apply_waveform_channel(in, chan, 64);
  for (int u = in.lo_tick(); u < in.hi_tick(); ++u)
    CHECK(std::abs(out.get_tick(u + 16) - in.get_tick(u)) < 1e-15);

  ChannelRealization zero;
  zero.paths.push_back({cplx{0.0, 0.0}, 3.0, 1.0});
  out = apply_waveform_channel(in, zero, 64);
  CHECK(energy(out.samples) == 0.0);

  // two equal-gain opposite-sign paths cancel exactly
  ChannelRealization cancel;
  cancel.paths.push_back({cplx{0.6, -0.4}, 2.71, 1.3});
  cancel.paths.push_back({cplx{-0.6, 0.4}, 2.71, 1.3});
  out = apply_waveform_channel(in, cancel, 64);
  CHECK(std::sqrt(energy(out.samples) / energy(in.samples)) < 1e-12);
}

TEST_CASE("apply_discrete_channel: identity and pure shift with delta pulse") {
  ExperimentConfig c = chain_config(64, 1);
  c.chan.delay_low = 0.0;  // delta pulse allows zero delay
  c.filter_halfspan = 0;
  auto vc = require_valid(c);
  Rng rng(9);
  const cvec x = random_frame(64, rng);
  const auto dl = make_delta(8);
  const auto gt = overall_pulse(dl, dl);
  FrameTaps t = modulate_frame(x, vc, dl, {.want_waveform = false});

  ChannelRealization ident;
  ident.paths.push_back({cplx{1.0, 0.0}, 0.0, 0.0});
  SignedVec r = apply_discrete_channel(t.s, ident, gt, vc.grid(), 0);
  CHECK(rel_error(r.v, t.s.v) < 1e-15);

  ChannelRealization shift;
  shift.paths.push_back({cplx{1.0, 0.0}, 2.0, 0.0});
  r = apply_discrete_channel(t.s, shift, gt, vc.grid(), 0);
  for (int l = r.lo() + 2; l < r.hi(); ++l) CHECK(std::abs(r.at(l) - t.s.at(l - 2)) < 1e-15);

  // band reaching before the frame start is rejected
  ChannelRealization bad;
  bad.paths.push_back({cplx{1.0, 0.0}, 1.0, 0.0});
  CHECK_THROWS_AS(apply_discrete_channel(t.s, bad, gt, vc.grid(), 4), IndexOutOfSupport);
}

TEST_CASE("apply_discrete_channel is linear in the input and the gains") {
  auto vc = require_valid(chain_config(64, 2));
  PulseSet ps = PulseSet::rrc_pair(0.2, 2, 8);
  Rng rng(21);
  const cvec x1 = random_frame(64, rng), x2 = random_frame(64, rng);
  FrameTaps t1 = modulate_frame(x1, vc, ps.tx, {.want_waveform = false});
  FrameTaps t2 = modulate_frame(x2, vc, ps.tx, {.want_waveform = false});

  ChannelRealization chan;
  chan.paths.push_back({cplx{0.3, 0.7}, 2.6, 1.2});
  chan.paths.push_back({cplx{-0.5, 0.1}, 3.9, -2.1});

  const SignedVec r1 = apply_discrete_channel(t1.s, chan, ps.gt, vc.grid(), 2);
  const SignedVec r2 = apply_discrete_channel(t2.s, chan, ps.gt, vc.grid(), 2);
  SignedVec sum = t1.s;
  for (std::size_t i = 0; i < sum.v.size(); ++i) sum.v[i] = t1.s.v[i] + t2.s.v[i];
  const SignedVec rs = apply_discrete_channel(sum, chan, ps.gt, vc.grid(), 2);
  cvec expect(r1.v.size());
  for (std::size_t i = 0; i < expect.size(); ++i) expect[i] = r1.v[i] + r2.v[i];
  CHECK(rel_error(rs.v, expect) < 1e-13);

  // superposition over paths
  ChannelRealization only1, only2;
  only1.paths.push_back(chan.paths[0]);
  only2.paths.push_back(chan.paths[1]);
  const SignedVec ra = apply_discrete_channel(t1.s, only1, ps.gt, vc.grid(), 2);
  const SignedVec rb = apply_discrete_channel(t1.s, only2, ps.gt, vc.grid(), 2);
  for (std::size_t i = 0; i < ra.v.size(); ++i)
    CHECK(std::abs(ra.v[i] + rb.v[i] - r1.v[i]) < 1e-13);
}

TEST_CASE("add_noise: zero variance, determinism, empirical variance") {
  SignedVec r(0, 100);
  Rng rng(3);
  for (auto& z : r.v) z = rng.cgauss();

  Rng n0(77);
  const SignedVec same = add_noise(r, 0.0, n0);
  for (std::size_t i = 0; i < r.v.size(); ++i) CHECK(same.v[i] == r.v[i]);

  Rng n1(88), n2(88);
  const SignedVec a = add_noise(r, 0.5, n1);
  const SignedVec b = add_noise(r, 0.5, n2);
  for (std::size_t i = 0; i < r.v.size(); ++i) CHECK(a.v[i] == b.v[i]);

  SignedVec big(0, 1000000);
  Rng n3(99);
  const SignedVec noisy = add_noise(big, 0.25, n3);
  CHECK(noisy.energy() / 1e6 == Catch::Approx(0.25).epsilon(0.01));
}

TEST_CASE("cross-backend: waveform equals discrete when nothing is truncated") {
  // tx/rx half-span 8 makes the overall support exactly the 16-sample band
  // limit, so with on-grid delays and no Doppler only interpolation and
  // rounding remain.
  ExperimentConfig c = chain_config(512, 16);
  c.pulse_rolloff = 0.2;
  auto vc = require_valid(c);
  PulseSet ps;
  ps.tx = make_rrc(0.2, 8, 8);
  ps.rx = ps.tx;
  ps.gt = overall_pulse(ps.tx, ps.rx);
  ps.mf_scale = PulseSet::raw_gain_inverse(ps.tx, ps.rx);

  Rng rng(31);
  const cvec x = random_frame(512, rng);

  SECTION("on-grid delays, no Doppler: agreement at rounding level") {
    ChannelRealization chan;
    chan.paths.push_back({cplx{0.8, -0.3}, 17.0 + 3.0 / 8.0, 0.0});
    chan.paths.push_back({cplx{-0.2, 0.5}, 21.0 + 5.0 / 8.0, 0.0});
    const SignedVec rw = via_waveform(vc, ps, x, chan);
    const SignedVec rd = via_discrete(vc, ps, x, chan);
    CHECK(rel_error(rw.v, rd.v) < 1e-12);
  }

  SECTION("fractional delays, no Doppler: only interpolation error remains") {
    ChannelRealization chan;
    chan.paths.push_back({cplx{0.8, -0.3}, 17.2345, 0.0});
    chan.paths.push_back({cplx{-0.2, 0.5}, 21.77, 0.0});
    const SignedVec rw = via_waveform(vc, ps, x, chan);
    const SignedVec rd = via_discrete(vc, ps, x, chan);
    CHECK(rel_error(rw.v, rd.v) < 1e-6);
  }
}

TEST_CASE("cross-backend: agreement within 1e-3 for K_max <= 3 and degrading in K_max") {
  ExperimentConfig c = chain_config(4096, 16);
  auto vc = require_valid(c);
  PulseSet ps = PulseSet::rrc_pair(0.2, 16, 8);
  Rng rng(37);
  const cvec x = random_frame(4096, rng);

  ChannelRealization base;
  base.paths.push_back({cplx{0.55, -0.35}, 17.31, 0.9});
  base.paths.push_back({cplx{-0.3, 0.44}, 24.86, -0.6});
  base.paths.push_back({cplx{0.2, 0.61}, 20.5, 0.3});

  double prev = -1.0;
  for (double kscale : {0.0, 1.0, 3.0}) {
    ChannelRealization chan = base;
    for (auto& p : chan.paths) p.k *= kscale;
    const SignedVec rw = via_waveform(vc, ps, x, chan);
    const SignedVec rd = via_discrete(vc, ps, x, chan);
    const double err = rel_error(rw.v, rd.v);
    CAPTURE(kscale, err);
    CHECK(err < 1e-3);
    CHECK(err > prev);  // narrowband-Doppler mismatch grows with K_max
    prev = err;
  }
}

TEST_CASE("channel realization CSV round trip") {
  ChannelGenParams p;
  p.P = 4;
  p.delay_low = 16.0;
  p.delay_high = 20.0;
  p.gain_variance = 0.25;
  Rng rng(51);
  const auto chan = draw_channel(p, rng);
  std::stringstream ss;
  save_channel_csv(chan, ss);
  const auto back = load_channel_csv(ss);
  REQUIRE(back.paths.size() == chan.paths.size());
  for (std::size_t i = 0; i < chan.paths.size(); ++i) {
    CHECK(back.paths[i].h == chan.paths[i].h);
    CHECK(back.paths[i].ell == chan.paths[i].ell);
    CHECK(back.paths[i].k == chan.paths[i].k);
  }
}
