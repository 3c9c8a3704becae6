// estimation.hpp - pilot-based channel estimation
//
// The pilot frame is a unit impulse at a scheduled index m_p, so the
// noiseless received frame is one column of the effective channel matrix.
// Estimation is greedy matching pursuit over a fractional delay-Doppler grid
// (1/4 sample x 1/4 subcarrier), each pick refined by two rounds of 5-point
// parabolic interpolation per axis, with a least-squares gain fit against the
// single-path column response. Atoms are generated by the same kernel that
// builds the channel matrix, so reconstruction with the true parameters
// reproduces it bit-for-bit.

#pragma once

#include <map>

#include "afdm/channel_matrix.hpp"

namespace afdm {

struct PathEstimate {
  cplx h_hat{0.0, 0.0};
  double ell_hat = 0.0;
  double k_hat = 0.0;
  double residual_energy = 0.0;
};

struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Single-path column responses a(ell, k) = H[:, m_p] for a unit-gain path,
// over the full set of receive rows. Caches the g_W combs across atoms.
class AtomBuilder {
 public:
  AtomBuilder(const ValidatedConfig& vc, const SampledPulse& g_t, const Window& win, int m_p)
      : vc_(vc), g_t_(g_t), win_(win), m_p_(m_p) {
    const GridConfig& g = vc.grid();
    M_ = g.M;
    two_m_c1_ = g.c1 * (2 * static_cast<std::int64_t>(M_));
    c2_col_ = std::polar(1.0, 2.0 * std::numbers::pi *
                                  frac_times(g.c2, static_cast<std::int64_t>(m_p) * m_p));
    c2_rows_.resize(static_cast<std::size_t>(M_));
    for (int m = 0; m < M_; ++m)
      c2_rows_[static_cast<std::size_t>(m)] = std::polar(
          1.0, -2.0 * std::numbers::pi * frac_times(g.c2, static_cast<std::int64_t>(m) * m));
  }

  cvec atom(double ell, double k) {
    const GridConfig& g = vc_.grid();
    const int hs = vc_.cfg().filter_halfspan;
    cvec a(static_cast<std::size_t>(M_), cplx{0.0, 0.0});
    const int b_lo = static_cast<int>(std::floor(ell)) - hs;
    const int b_hi = static_cast<int>(std::ceil(ell)) + hs;
    for (int lp = b_lo; lp <= b_hi; ++lp) {
      const double gt = sample_gt(g_t_, static_cast<double>(lp) - ell);
      if (gt == 0.0) continue;
      const __int128 num = static_cast<__int128>(two_m_c1_.num) * lp;
      __int128 qint = num / two_m_c1_.den;
      if (num % two_m_c1_.den != 0 && num < 0) qint -= 1;
      const double t = frac_times(two_m_c1_, lp) - k;
      const double tfloor = std::floor(t);
      double phi = t - tfloor;
      std::int64_t n0 = static_cast<std::int64_t>(qint) + static_cast<std::int64_t>(tfloor);
      if (phi >= 1.0) {
        phi -= 1.0;
        n0 += 1;
      }
      auto it = combs_.find(phi);
      if (it == combs_.end()) it = combs_.emplace(phi, gw_comb(win_, M_, phi)).first;
      const cvec& G = it->second;

      std::int64_t q = (static_cast<std::int64_t>(m_p_) * lp) % M_;
      if (q < 0) q += M_;
      const cplx coef =
          gt *
          std::polar(1.0, 2.0 * std::numbers::pi *
                              (frac_times(g.c1, static_cast<std::int64_t>(lp) * lp) -
                               static_cast<double>(q) / M_));
      std::int64_t idx = (0 - m_p_ + n0) % M_;
      if (idx < 0) idx += M_;
      for (int m = 0; m < M_; ++m) {
        a[static_cast<std::size_t>(m)] += coef * G[static_cast<std::size_t>(idx)];
        if (++idx == M_) idx = 0;
      }
    }
    for (int m = 0; m < M_; ++m) a[static_cast<std::size_t>(m)] *= c2_rows_[static_cast<std::size_t>(m)] * c2_col_;
    return a;
  }

 private:
  const ValidatedConfig& vc_;
  const SampledPulse& g_t_;
  const Window& win_;
  int m_p_;
  int M_ = 0;
  Rational two_m_c1_{0, 1};
  cplx c2_col_{1.0, 0.0};
  cvec c2_rows_;
  std::map<double, cvec> combs_;
};

struct EstimatorOptions {
  double grid_step_ell = 0.25;
  double grid_step_k = 0.25;
  int refine_rounds = 2;
  double stop_rel_residual = 1e-12;
};

namespace detail {

inline cplx inner(const cvec& a, const cvec& b) {
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

}  // namespace detail

// Greedy matching pursuit; returns up to max_paths path estimates with
// non-increasing residual energy.
inline std::vector<PathEstimate> estimate_channel(const cvec& y_pilot, const cvec& x_pilot,
                                                  const ValidatedConfig& vc,
                                                  const SampledPulse& g_t, const Window& win,
                                                  int max_paths,
                                                  const EstimatorOptions& opts = {}) {
  const GridConfig& g = vc.grid();
  if (static_cast<int>(y_pilot.size()) != g.M || static_cast<int>(x_pilot.size()) != g.M)
    throw DimensionMismatch("estimate_channel: pilot frames must have length M");
  // locate the pilot impulse
  int m_p = 0;
  double best = 0.0;
  for (int m = 0; m < g.M; ++m) {
    const double a = std::abs(x_pilot[static_cast<std::size_t>(m)]);
    if (a > best) {
      best = a;
      m_p = m;
    }
  }
  if (best == 0.0) throw std::invalid_argument("estimate_channel: empty pilot frame");
  const cplx pilot_amp = x_pilot[static_cast<std::size_t>(m_p)];

  std::vector<PathEstimate> found;
  cvec residual = y_pilot;
  double res_energy = energy(residual);
  const double initial = res_energy;
  if (initial == 0.0) return found;

  AtomBuilder atoms(vc, g_t, win, m_p);
  const ChannelGenParams& cp = vc.chan();

  auto score_of = [&](const cvec& a) {
    const double e = energy(a);
    if (e == 0.0) return std::pair<double, cplx>{0.0, cplx{0.0, 0.0}};
    const cplx ip = detail::inner(a, residual);
    return std::pair<double, cplx>{std::norm(ip) / e, ip / e};
  };

  for (int it = 0; it < max_paths; ++it) {
    // coarse grid search
    double best_score = -1.0, best_ell = cp.delay_low, best_k = 0.0;
    for (double ell = cp.delay_low; ell <= cp.delay_high + 1e-12; ell += opts.grid_step_ell) {
      for (double k = -cp.K_max; k <= cp.K_max + 1e-12; k += opts.grid_step_k) {
        const auto [sc, h] = score_of(atoms.atom(ell, k));
        if (sc > best_score) {
          best_score = sc;
          best_ell = ell;
          best_k = k;
        }
      }
    }
    // parabolic refinement, two rounds per axis with shrinking probes
    double ell = best_ell, k = best_k;
    double cur = best_score;
    for (int round = 0; round < opts.refine_rounds; ++round) {
      const double de = opts.grid_step_ell / (2 << (2 * round));
      const double dk = opts.grid_step_k / (2 << (2 * round));
      for (int axis = 0; axis < 2; ++axis) {
        const double delta = (axis == 0) ? de : dk;
        double s[5];
        for (int i = -2; i <= 2; ++i) {
          double e2 = ell + (axis == 0 ? i * delta : 0.0);
          double k2 = k + (axis == 1 ? i * delta : 0.0);
          e2 = std::clamp(e2, cp.delay_low, cp.delay_high);
          k2 = std::clamp(k2, -cp.K_max, cp.K_max);
          s[i + 2] = score_of(atoms.atom(e2, k2)).first;
        }
        int b = 0;
        for (int i = 1; i < 5; ++i)
          if (s[i] > s[b]) b = i;
        b = std::clamp(b, 1, 3);
        const double denom = s[b - 1] - 2.0 * s[b] + s[b + 1];
        double off = 0.0;
        if (std::abs(denom) > 0.0) off = 0.5 * (s[b - 1] - s[b + 1]) / denom;
        off = std::clamp(off, -1.0, 1.0);
        const double theta = (b - 2) + off;
        if (axis == 0)
          ell = std::clamp(ell + theta * delta, cp.delay_low, cp.delay_high);
        else
          k = std::clamp(k + theta * delta, -cp.K_max, cp.K_max);
      }
      const double sc = score_of(atoms.atom(ell, k)).first;
      if (sc < cur) {  // refinement must not lose ground
        ell = best_ell;
        k = best_k;
        break;
      }
      cur = sc;
    }

    cvec a = atoms.atom(ell, k);
    const double ea = energy(a);
    if (ea == 0.0) break;
    const cplx ip = detail::inner(a, residual);
    const cplx h_fit = ip / ea;
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= h_fit * a[i];
    const double new_energy = energy(residual);
    if (new_energy > res_energy * (1.0 + 1e-9))
      throw NoConvergence("estimate_channel: residual increased");

    PathEstimate pe;
    pe.h_hat = h_fit / pilot_amp;
    pe.ell_hat = ell;
    pe.k_hat = k;
    pe.residual_energy = new_energy;
    found.push_back(pe);
    res_energy = new_energy;
    if (res_energy <= opts.stop_rel_residual * initial) break;
  }
  return found;
}

// Same kernel as build_h, fed with the estimated path list.
inline ChannelMatrix reconstruct_h(const std::vector<PathEstimate>& estimates,
                                   const ValidatedConfig& vc, const SampledPulse& g_t,
                                   const Window& win, IndexRange rows, IndexRange cols) {
  ChannelRealization chan;
  chan.params = vc.chan();
  for (const auto& e : estimates) chan.paths.push_back({e.h_hat, e.ell_hat, e.k_hat});
  return build_h_block(vc, chan, g_t, win, rows, cols);
}

inline ChannelMatrix reconstruct_h(const std::vector<PathEstimate>& estimates,
                                   const ValidatedConfig& vc, const SampledPulse& g_t,
                                   const Window& win) {
  const int M = vc.grid().M;
  return reconstruct_h(estimates, vc, g_t, win, {0, M}, {0, M});
}

// ||H_hat - H||_F^2 / ||H||_F^2
inline double nmse(const MatrixXc& H_hat, const MatrixXc& H) {
  if (H_hat.rows() != H.rows() || H_hat.cols() != H.cols())
    throw DimensionMismatch("nmse: dimension mismatch");
  const double den = H.squaredNorm();
  if (den == 0.0) return H_hat.squaredNorm() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return (H_hat - H).squaredNorm() / den;
}

inline double nmse(const ChannelMatrix& H_hat, const ChannelMatrix& H) {
  return nmse(H_hat.m, H.m);
}

}  // namespace afdm
