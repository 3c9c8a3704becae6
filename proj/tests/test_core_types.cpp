#include <catch2/catch_amalgamated.hpp>

#include "afdm/core_types.hpp"

using namespace afdm;

namespace {

ExperimentConfig paper_profile() {
  ExperimentConfig c;
  c.grid.M = 4096;
  c.grid.c1 = compute_c1(3, 4, 4096);
  c.grid.L_D = 288;
  c.grid.L_W = 0;
  c.grid.L_R = 288;
  c.grid.schd_lo = 0;
  c.grid.schd_hi = 600;
  c.chan.P = 10;
  c.chan.delay_low = 16.0;
  c.chan.delay_high = 26.0;
  c.chan.gain_variance = 0.1;
  c.filter_halfspan = 16;
  c.qam_bits = 10;
  c.mode = RxMode::kOsPs;
  return c;
}

}  // namespace

TEST_CASE("rational arithmetic is exact") {
  Rational a(15, 8192);
  CHECK(a.num == 15);
  CHECK(a.den == 8192);
  CHECK((a * 8192).num == 15);
  CHECK((a * 8192).den == 1);
  CHECK(Rational(4, 8) == Rational(1, 2));
  CHECK(Rational(-3, -6) == Rational(1, 2));
  // frac(15/8192 * 8192) = 0
  CHECK(frac_times(a, 8192) == 0.0);
  // frac(1/3 * 5) = 2/3
  CHECK(frac_times(Rational(1, 3), 5) == Catch::Approx(2.0 / 3.0));
  // negative multiplier wraps into [0, 1)
  CHECK(frac_times(Rational(1, 4), -1) == Catch::Approx(0.75));
  CHECK(parse_rational("15/1024") == Rational(15, 1024));
  CHECK(parse_rational("3") == Rational(3, 1));
}

TEST_CASE("compute_c1 matches the closed form") {
  // (2*(3+4)+1) / (2*4096) = 15/8192
  CHECK(compute_c1(3, 4, 4096) == Rational(15, 8192));
  // zeros degenerate to 1/(2M)
  CHECK(compute_c1(0, 0, 64) == Rational(1, 128));
  // desk-scale M
  CHECK(compute_c1(3, 4, 512) == Rational(15, 1024));
  CHECK_THROWS_AS(compute_c1(3, 4, 0), std::invalid_argument);
}

TEST_CASE("2*M*c1 is always an odd integer") {
  for (int K_max = 0; K_max <= 6; ++K_max)
    for (int K_res = 0; K_res <= 6; ++K_res)
      for (int M : {16, 128, 512, 600, 4096}) {
        const Rational c1 = compute_c1(K_max, K_res, M);
        const Rational twice = c1 * (2 * static_cast<std::int64_t>(M));
        CHECK(twice.is_odd_integer());
      }
}

TEST_CASE("validate_config accepts the full-scale profile") {
  const auto res = validate_config(paper_profile());
  CAPTURE(InvalidConfig::describe(res.violations));
  REQUIRE(res.ok());
  CHECK(res.config->overlap() == 0);
}

TEST_CASE("validate_config rejects a too-short prefix removal") {
  ExperimentConfig c = paper_profile();
  c.grid.L_R = 10;
  c.grid.L_D = 10;  // keep L_R <= L_D + L_W
  c.chan.delay_high = 26.0;
  const auto res = validate_config(c);
  REQUIRE_FALSE(res.ok());
  bool found = false;
  for (const auto& v : res.violations)
    if (v.field == "L_R" && v.reason.find("prefix removal") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("validate_config computes the overlap of a shaped grid") {
  ExperimentConfig c;
  c.grid.M = 512;
  c.grid.L_D = 36;
  c.grid.L_W = 36;
  c.grid.L_R = 36;
  c.grid.c1 = compute_c1(3, 4, 512);
  c.chan.delay_low = 16.0;
  c.chan.delay_high = 20.0;
  c.mode = RxMode::kOsPs;
  const auto res = validate_config(c);
  CAPTURE(InvalidConfig::describe(res.violations));
  REQUIRE(res.ok());
  // D = 36 + 36 - 36 = 36; alpha_W = 36/512 = 9/128
  CHECK(res.config->overlap() == 36);
  CHECK(res.config->alpha_w() == Rational(36, 512));
}

TEST_CASE("alpha_W stays an exact rational D/M") {
  for (int D : {0, 25, 36, 102, 154}) {
    GridConfig g;
    g.M = 512;
    g.L_D = 36;
    g.L_R = 36;
    g.L_W = D;
    CHECK(g.overlap() == D);
    CHECK(g.alpha_w() == Rational(D, 512));
    // D equals M * alpha_W exactly in integer arithmetic
    const Rational prod = g.alpha_w() * 512;
    CHECK(prod == Rational(D, 1));
  }
}

TEST_CASE("plain/direct modes demand a zero overlap") {
  ExperimentConfig c = paper_profile();
  c.grid.L_W = 40;  // D = 40
  c.mode = RxMode::kPlain;
  const auto res = validate_config(c);
  REQUIRE_FALSE(res.ok());
  CHECK(res.violations[0].field == "mode");
}

TEST_CASE("resolve_prefix_strategy boundary and shaping cases") {
  GridConfig g;
  g.M = 4096;
  g.L_D = 288;

  // full-delay estimate leaves nothing for shaping
  auto p = resolve_prefix_strategy(PrefixStrategy::kLowOverhead, 288, 0, g);
  CHECK(p.L_W == 0);
  CHECK(p.L_R == 288);
  CHECK(p.alpha_w == Rational(0, 1));

  // unused delay margin becomes roll-off: (288-200)/4096 = 88/4096
  p = resolve_prefix_strategy(PrefixStrategy::kLowOverhead, 200, 0, g);
  CHECK(p.L_W == 0);
  CHECK(p.L_R == 200);
  CHECK(p.alpha_w == Rational(88, 4096));

  // low-sidelobe reserves the extension: 819/4096 ~ 0.2
  p = resolve_prefix_strategy(PrefixStrategy::kLowSidelobe, 288, 819, g);
  CHECK(p.L_W == 819);
  CHECK(p.L_R == 288);
  CHECK(p.alpha_w == Rational(819, 4096));
  CHECK(p.alpha_w.value() == Catch::Approx(0.19995).margin(1e-4));

  CHECK_THROWS_AS(resolve_prefix_strategy(PrefixStrategy::kLowOverhead, 300, 0, g),
                  StrategyInfeasible);
  GridConfig tiny = g;
  tiny.M = 100;
  CHECK_THROWS_AS(resolve_prefix_strategy(PrefixStrategy::kLowSidelobe, 0, 500, tiny),
                  StrategyInfeasible);
}

TEST_CASE("low-sidelobe roll-off dominates low-overhead for the same delay estimate") {
  GridConfig g;
  g.M = 1024;
  g.L_D = 80;
  for (int tau = 0; tau <= 80; tau += 16) {
    const auto lo = resolve_prefix_strategy(PrefixStrategy::kLowOverhead, tau, 64, g);
    const auto ls = resolve_prefix_strategy(PrefixStrategy::kLowSidelobe, tau, 64, g);
    CHECK(lo.alpha_w <= ls.alpha_w);
  }
}
