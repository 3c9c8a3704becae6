#include <catch2/catch_amalgamated.hpp>

#include "afdm/link.hpp"
#include "afdm/rng.hpp"
#include "afdm/transmitter.hpp"

using namespace afdm;

namespace {

cvec random_frame(int M, Rng& rng) {
  cvec x(static_cast<std::size_t>(M));
  for (auto& z : x) z = rng.cgauss();
  return x;
}

ValidatedConfig desk_config() {
  ExperimentConfig c;
  c.grid.M = 64;
  c.grid.L_D = 8;
  c.grid.L_W = 8;
  c.grid.L_R = 8;
  c.grid.c1 = compute_c1(1, 1, 64);
  c.grid.c2 = Rational(1, 97);
  c.grid.schd_lo = 0;
  c.grid.schd_hi = 64;
  c.chan.delay_low = 2.0;
  c.chan.delay_high = 4.0;
  c.filter_halfspan = 2;
  c.oversample = 4;
  return require_valid(c);
}

}  // namespace

TEST_CASE("prechirp: zero rate is the identity, magnitudes preserved") {
  Rng rng(3);
  const cvec x = random_frame(16, rng);
  const cvec y = prechirp(x, Rational(0, 1));
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == x[i]);

  const cvec z = prechirp(x, Rational(3, 17));
  CHECK(z[0] == x[0]);  // m' = 0 exponent vanishes
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(std::abs(z[i]) == Catch::Approx(std::abs(x[i])));
}

TEST_CASE("prechirp: c2 = 1/4 over four symbols") {
  // exp(j pi m'^2 / 2) for m' = 0..3 -> 1, j, 1, j
  const cvec x = {1.0, 1.0, 1.0, 1.0};
  const cvec y = prechirp(x, Rational(1, 4));
  CHECK(std::abs(y[0] - cplx{1, 0}) < 1e-15);
  CHECK(std::abs(y[1] - cplx{0, 1}) < 1e-15);
  CHECK(std::abs(y[2] - cplx{1, 0}) < 1e-15);
  CHECK(std::abs(y[3] - cplx{0, 1}) < 1e-15);
}

TEST_CASE("ifft_m: impulse, all-ones, unitarity") {
  cvec e(32, cplx{0, 0});
  e[0] = 1.0;
  const cvec flat = ifft_m(e);
  for (const auto& z : flat) CHECK(std::abs(z - cplx{1.0 / std::sqrt(32.0), 0.0}) < 1e-14);

  cvec ones(32, cplx{1, 0});
  const cvec imp = ifft_m(ones);
  CHECK(std::abs(imp[0] - cplx{std::sqrt(32.0), 0.0}) < 1e-12);
  for (std::size_t i = 1; i < imp.size(); ++i) CHECK(std::abs(imp[i]) < 1e-12);

  Rng rng(5);
  const cvec x = random_frame(64, rng);
  const cvec rt = fft_unitary(ifft_unitary(x));
  CHECK(rel_error(rt, x) < 1e-12);
  CHECK(energy(ifft_m(x)) == Catch::Approx(energy(x)).epsilon(1e-12));
}

TEST_CASE("add_extended_cp: cyclic copy of the tail") {
  cvec s0(8);
  for (int i = 0; i < 8; ++i) s0[static_cast<std::size_t>(i)] = static_cast<double>(i);
  const SignedVec s1 = add_extended_cp(s0, 2, 1);
  REQUIRE(s1.lo() == -3);
  REQUIRE(s1.hi() == 8);
  // [5,6,7,0,1,2,3,4,5,6,7]
  const double expect[] = {5, 6, 7, 0, 1, 2, 3, 4, 5, 6, 7};
  for (int l = -3; l < 8; ++l)
    CHECK(s1.at(l).real() == Catch::Approx(expect[l + 3]));
  // periodicity property
  for (int k = 1; k <= 3; ++k) CHECK(s1.at(-k) == s1.at(8 - k));

  const SignedVec id = add_extended_cp(s0, 0, 0);
  CHECK(id.lo() == 0);
  for (int l = 0; l < 8; ++l) CHECK(id.at(l) == s0[static_cast<std::size_t>(l)]);
}

TEST_CASE("chirp: zero rate, zero index, conjugate cancellation") {
  Rng rng(7);
  cvec raw = random_frame(24, rng);
  SignedVec s1 = add_extended_cp(raw, 4, 2);

  const SignedVec same = chirp(s1, Rational(0, 1));
  for (int l = same.lo(); l < same.hi(); ++l) CHECK(same.at(l) == s1.at(l));

  const Rational c1(5, 48);
  const SignedVec s = chirp(s1, c1);
  CHECK(s.at(0) == s1.at(0));
  // de-chirp with the same signed indexing recovers s1
  SignedVec back = s;
  for (int l = back.lo(); l < back.hi(); ++l) {
    const double ph = frac_times(c1, static_cast<std::int64_t>(l) * l);
    back.at(l) = s.at(l) * std::polar(1.0, -2.0 * std::numbers::pi * ph);
  }
  double worst = 0.0;
  for (int l = back.lo(); l < back.hi(); ++l) worst = std::max(worst, std::abs(back.at(l) - s1.at(l)));
  CHECK(worst < 1e-14);
}

TEST_CASE("chirped prefix equals a chirp-scaled copy of the frame tail") {
  // the plain-CP-then-chirp order reproduces a chirp-periodic prefix
  auto vc = desk_config();
  Rng rng(11);
  const cvec x = random_frame(vc.grid().M, rng);
  const FrameTaps t = modulate_frame(x, vc, make_delta(vc.cfg().oversample),
                                     {.want_waveform = false});
  const Rational c1 = vc.grid().c1;
  for (int l = -vc.grid().prefix_len(); l < 0; ++l) {
    const double ph = frac_times(c1, static_cast<std::int64_t>(l) * l);
    const cplx expect = t.s0[static_cast<std::size_t>(l + vc.grid().M)] *
                        std::polar(1.0, 2.0 * std::numbers::pi * ph);
    CHECK(std::abs(t.s.at(l) - expect) < 1e-14);
  }
}

TEST_CASE("shape_to_waveform: delta shaping and impulse response") {
  // delta pulse at oversample 1 reproduces the input on the tick grid
  cvec raw(12, cplx{0, 0});
  raw[3] = {1.0, -2.0};
  SignedVec s = add_extended_cp(raw, 2, 0);
  Waveform w = shape_to_waveform(s, make_delta(1), 1);
  for (int l = s.lo(); l < s.hi(); ++l) CHECK(w.get_tick(l) == s.at(l));

  // a single unit sample reproduces the pulse taps shifted to its tick
  const auto tx = make_rrc(0.2, 4, 4);
  SignedVec one(0, 8);
  one.at(5) = 1.0;
  w = shape_to_waveform(one, tx, 4);
  for (int k = 0; k < static_cast<int>(tx.taps.size()); ++k) {
    const int tick = 5 * 4 + (k - tx.center_index);
    CHECK(std::abs(w.get_tick(tick) - cplx{tx.taps[static_cast<std::size_t>(k)], 0.0}) < 1e-15);
  }
}

TEST_CASE("modulate_frame: linearity and per-stage energy accounting") {
  auto vc = desk_config();
  Rng rng(13);
  const cvec x1 = random_frame(vc.grid().M, rng);
  const cvec x2 = random_frame(vc.grid().M, rng);
  const cplx a{0.7, -0.2}, b{-1.1, 0.4};

  const auto tx = make_rrc(0.2, vc.cfg().filter_halfspan, vc.cfg().oversample);
  const FrameTaps t1 = modulate_frame(x1, vc, tx);
  const FrameTaps t2 = modulate_frame(x2, vc, tx);
  cvec xc(x1.size());
  for (std::size_t i = 0; i < xc.size(); ++i) xc[i] = a * x1[i] + b * x2[i];
  const FrameTaps tc = modulate_frame(xc, vc, tx);

  cvec combo(t1.s.v.size());
  for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = a * t1.s.v[i] + b * t2.s.v[i];
  CHECK(rel_error(tc.s.v, combo) < 1e-12);

  // zero in, zero out
  const FrameTaps tz = modulate_frame(cvec(x1.size(), cplx{0, 0}), vc, tx);
  CHECK(tz.s.energy() == 0.0);
  CHECK(energy(tz.waveform->samples) == 0.0);

  // unitary IFFT and unimodular chirps preserve stage energies
  CHECK(energy(t1.s0) == Catch::Approx(energy(t1.x)).epsilon(1e-12));
  CHECK(t1.s.energy() == Catch::Approx(t1.s1.energy()).epsilon(1e-12));
}
