// core_types.hpp - numerology, scheduling and experiment configuration
//
// GridConfig carries the frame geometry: M subcarriers, chirp rates c1/c2,
// the prefix budget (L_D for delay spread, L_W extended for window shaping,
// L_R removed at the receiver) and the contiguous scheduled subcarrier range.
// The derived overlap length D = L_D + L_W - L_R and roll-off
// alpha_W = D / M are kept as exact integers/rationals.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "afdm/rational.hpp"

namespace afdm {

enum class WindowKind { kRaisedCosine, kChebyshev, kRectangular };
enum class RxMode { kOsPs, kDirectWindow, kPlain };

inline const char* to_string(WindowKind k) {
  switch (k) {
    case WindowKind::kRaisedCosine: return "rc";
    case WindowKind::kChebyshev: return "chebyshev";
    case WindowKind::kRectangular: return "rectangular";
  }
  return "?";
}

inline const char* to_string(RxMode m) {
  switch (m) {
    case RxMode::kOsPs: return "os-ps";
    case RxMode::kDirectWindow: return "direct-window";
    case RxMode::kPlain: return "plain";
  }
  return "?";
}

struct GridConfig {
  int M = 512;               // subcarrier count
  double delta_f = 15e3;     // subcarrier spacing [Hz]
  Rational c1{15, 1024};     // chirp-rate (per-sample^2)
  Rational c2{0, 1};         // prechirp-rate (per-symbol^2)
  int L_D = 36;              // prefix budget for delay spread [samples]
  int L_W = 0;               // extended prefix for window shaping [samples]
  int L_R = 36;              // prefix samples removed at the receiver
  int schd_lo = 0;           // scheduled subcarriers [schd_lo, schd_hi)
  int schd_hi = 128;

  int overlap() const { return L_D + L_W - L_R; }      // D
  int prefix_len() const { return L_D + L_W; }
  int frame_len() const { return M + L_D + L_W; }
  int scheduled_count() const { return schd_hi - schd_lo; }
  Rational alpha_w() const { return Rational(overlap(), M); }
  double delta_t() const { return 1.0 / (M * delta_f); }
};

struct ChannelGenParams {
  int P = 4;                  // path count
  double K_max = 3.0;         // max normalized Doppler [subcarriers]
  int K_res = 4;              // Doppler guard margin in the c1 formula
  double delay_low = 16.0;    // uniform support of the normalized delay
  double delay_high = 20.0;
  double gain_variance = 0.25;  // per-path variance, 1/P
};

struct ExperimentConfig {
  GridConfig grid;
  ChannelGenParams chan;
  double pulse_rolloff = 0.2;
  int oversample = 8;         // waveform up-sampling factor
  int filter_halfspan = 16;   // L_T/2, samples at rate M*delta_f
  WindowKind window_kind = WindowKind::kRaisedCosine;
  double cheb_atten_db = 60.0;
  RxMode mode = RxMode::kOsPs;
  int qam_bits = 2;           // Q_m, even
  std::vector<double> snr_grid_db = {0, 5, 10, 15, 20, 25};
  int trials = 50;
  std::uint64_t seed = 12345;
};

struct ConfigViolation {
  std::string field;
  std::string reason;
};

struct InvalidConfig : std::runtime_error {
  std::vector<ConfigViolation> violations;
  explicit InvalidConfig(std::vector<ConfigViolation> v)
      : std::runtime_error(describe(v)), violations(std::move(v)) {}

  static std::string describe(const std::vector<ConfigViolation>& v) {
    std::string s = "invalid config:";
    for (const auto& x : v) s += " [" + x.field + ": " + x.reason + "]";
    return s;
  }
};

// A config that passed validate_config. Construction is restricted to the
// validator so downstream code can rely on the invariants.
class ValidatedConfig {
 public:
  const ExperimentConfig& cfg() const { return cfg_; }
  const GridConfig& grid() const { return cfg_.grid; }
  const ChannelGenParams& chan() const { return cfg_.chan; }
  int overlap() const { return cfg_.grid.overlap(); }
  Rational alpha_w() const { return cfg_.grid.alpha_w(); }

 private:
  friend struct ValidationResult;
  explicit ValidatedConfig(ExperimentConfig c) : cfg_(std::move(c)) {}
  ExperimentConfig cfg_;
};

struct ValidationResult {
  std::vector<ConfigViolation> violations;
  std::optional<ValidatedConfig> config;

  bool ok() const { return violations.empty(); }

  static ValidationResult accept(ExperimentConfig c) {
    ValidationResult r;
    r.config.emplace(ValidatedConfig(std::move(c)));
    return r;
  }
};

// c1 = (2*(K_max + K_res) + 1) / (2*M). The numerator is odd, so 2*M*c1 is an
// odd integer and integer delays map to integer shifts in the DAFT domain.
inline Rational compute_c1(int K_max, int K_res, int M) {
  if (M <= 0) throw std::invalid_argument("compute_c1: M must be positive");
  return Rational(2 * (static_cast<std::int64_t>(K_max) + K_res) + 1, 2 * static_cast<std::int64_t>(M));
}

inline ValidationResult validate_config(const ExperimentConfig& cfg) {
  std::vector<ConfigViolation> v;
  const GridConfig& g = cfg.grid;
  auto bad = [&v](const std::string& field, const std::string& reason) {
    v.push_back({field, reason});
  };

  if (g.M <= 0) bad("M", "subcarrier count must be positive");
  if (g.delta_f <= 0) bad("delta_f", "subcarrier spacing must be positive");
  if (g.L_D < 0) bad("L_D", "negative prefix length");
  if (g.L_W < 0) bad("L_W", "negative extended prefix length");
  if (g.L_R < 0) bad("L_R", "negative removed-prefix length");
  if (g.L_R > g.L_D + g.L_W) bad("L_R", "cannot remove more prefix than was added");
  if (g.M > 0) {
    const int D = g.overlap();
    if (D < 0 || D >= g.M) bad("L_W", "overlap D = L_D+L_W-L_R outside [0, M)");
    if (g.prefix_len() >= g.M) bad("L_D", "prefix L_D+L_W must be shorter than M");
    if (g.schd_lo < 0 || g.schd_hi > g.M || g.schd_lo >= g.schd_hi)
      bad("scheduled", "scheduled range must be a non-empty subrange of [0, M)");
  }

  const ChannelGenParams& c = cfg.chan;
  if (c.P <= 0) bad("P", "path count must be positive");
  if (c.K_max < 0) bad("K_max", "negative Doppler bound");
  if (c.delay_low > c.delay_high) bad("delay_low", "empty delay support");
  if (c.delay_low < cfg.filter_halfspan)
    bad("delay_low", "path delay below the pulse half-support");
  if (static_cast<double>(g.L_R) < c.delay_high + cfg.filter_halfspan)
    bad("L_R", "prefix removal shorter than channel span");
  if (c.gain_variance <= 0) bad("gain_variance", "must be positive");

  if (cfg.pulse_rolloff < 0 || cfg.pulse_rolloff > 1)
    bad("pulse_rolloff", "roll-off outside [0, 1]");
  if (cfg.oversample < 1) bad("oversample", "up-sampling factor must be >= 1");
  if (cfg.filter_halfspan < 0) bad("filter_halfspan", "negative pulse half-span");
  if (cfg.qam_bits < 2 || cfg.qam_bits > 10 || (cfg.qam_bits % 2) != 0)
    bad("qam_bits", "Q_m must be even and within [2, 10]");
  if (cfg.trials < 1) bad("trials", "trial count must be >= 1");
  if (cfg.cheb_atten_db <= 0 && cfg.window_kind == WindowKind::kChebyshev)
    bad("cheb_atten_db", "Chebyshev attenuation must be positive");
  if (cfg.mode != RxMode::kOsPs && g.overlap() != 0)
    bad("mode", "direct-window and plain modes require D = 0 (full prefix removal)");

  if (!v.empty()) {
    ValidationResult r;
    r.violations = std::move(v);
    return r;
  }
  return ValidationResult::accept(cfg);
}

// Throwing convenience wrapper.
inline ValidatedConfig require_valid(const ExperimentConfig& cfg) {
  ValidationResult r = validate_config(cfg);
  if (!r.ok()) throw InvalidConfig(std::move(r.violations));
  return *std::move(r.config);
}

enum class PrefixStrategy { kLowOverhead, kLowSidelobe };

struct PrefixPlan {
  int L_W = 0;
  int L_R = 0;
  Rational alpha_w{0, 1};
};

struct StrategyInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Splits the prefix budget between overhead and window shaping.
// Low-overhead: no extension; whatever delay margin is unused (L_D - L_tau)
// becomes window roll-off opportunistically. Low-sidelobe: reserve L_W_min of
// extension so the roll-off never drops below L_W_min / M.
inline PrefixPlan resolve_prefix_strategy(PrefixStrategy strategy, int L_tau_est, int L_W_min,
                                          const GridConfig& grid) {
  if (L_tau_est > grid.L_D)
    throw StrategyInfeasible("estimated delay spread exceeds the prefix budget L_D");
  PrefixPlan p;
  p.L_R = L_tau_est;
  p.L_W = (strategy == PrefixStrategy::kLowOverhead) ? 0 : L_W_min;
  const int D = grid.L_D + p.L_W - p.L_R;
  if (D < 0 || D >= grid.M)
    throw StrategyInfeasible("resulting overlap D outside [0, M)");
  p.alpha_w = Rational(D, grid.M);
  return p;
}

}  // namespace afdm
