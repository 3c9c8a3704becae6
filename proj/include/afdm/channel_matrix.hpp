// channel_matrix.hpp - effective DAFT-domain channel matrix and noise
// covariance
//
// Entry structure:
//   H[m, m'] = sum_p sum_{l'} h_p
//              * exp(j 2 pi (c1 l'^2 + c2 (m'^2 - m^2) - m' l' / M))
//              * g_T(Delta_T (l' - ell_p))
//              * g_W(Delta_F (m - (m' - (2 M c1 l' - k_p))))
// with l' in [floor(ell_p) - L_T/2, ceil(ell_p) + L_T/2].
//
// g_W is evaluated through gw_comb: for fixed (p, l') the argument varies over
// integers plus a fixed fractional offset, so one length-M DFT yields the
// whole row of g_W values. This is the same sum as eval_gw, reordered, so the
// result is exact, not an interpolation. When 2*M*c1 is an integer (the
// standard chirp-rate choice) the fractional offset depends only on p and the
// cache holds one comb per path.
//
// The noise transform chain is w = C2 F_M S W B C1 n with
//   C1 = diag exp(-j 2 pi c1 l^2)   (signed l over the full frame)
//   B  = [0, I]                     (drop removed-prefix rows)
//   W  = diag W_T[l]                (receive window, l in [-D, M))
//   S  = overlap-summation operator (fold last D retained prefix rows)
//   F_M = unitary DFT, C2 = diag exp(-j 2 pi c2 m^2)
// and R_w = T R_n T^H for T the product above.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <map>

#include "afdm/channel.hpp"
#include "afdm/core_types.hpp"
#include "afdm/fft.hpp"
#include "afdm/pulses.hpp"
#include "afdm/windows.hpp"

namespace afdm {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

struct NotSquare : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChannelMatrix {
  MatrixXc m;
  int row0 = 0;  // DAFT index of row 0
  int col0 = 0;  // DAFT index of column 0
  std::string tag;
};

struct IndexRange {
  int lo = 0;
  int hi = 0;
  int count() const { return hi - lo; }
};

// H restricted to the given row/column index ranges (full matrix: [0, M) on
// both axes; equalizer system: all rows, scheduled columns).
inline ChannelMatrix build_h_block(const ValidatedConfig& vc, const ChannelRealization& chan,
                                   const SampledPulse& g_t, const Window& win, IndexRange rows,
                                   IndexRange cols) {
  const GridConfig& g = vc.grid();
  const int M = g.M;
  const int hs = vc.cfg().filter_halfspan;
  ChannelMatrix H;
  H.row0 = rows.lo;
  H.col0 = cols.lo;
  H.m = MatrixXc::Zero(rows.count(), cols.count());
  H.tag = std::string(to_string(win.kind)) + ":D=" + std::to_string(win.D);

  const Rational two_m_c1 = g.c1 * (2 * static_cast<std::int64_t>(M));
  std::map<double, cvec> comb_cache;

  for (const auto& p : chan.paths) {
    if (p.h == cplx{0.0, 0.0}) continue;
    const int b_lo = static_cast<int>(std::floor(p.ell)) - hs;
    const int b_hi = static_cast<int>(std::ceil(p.ell)) + hs;
    for (int lp = b_lo; lp <= b_hi; ++lp) {
      const double gt = sample_gt(g_t, static_cast<double>(lp) - p.ell);
      if (gt == 0.0) continue;
      // DAFT-domain shift of this tap: 2*M*c1*l' - k_p, split into integer
      // and fractional parts in exact arithmetic so large l' costs no
      // precision.
      const __int128 num = static_cast<__int128>(two_m_c1.num) * lp;
      __int128 qint = num / two_m_c1.den;
      if (num % two_m_c1.den != 0 && ((num < 0) != (two_m_c1.den < 0))) qint -= 1;
      const double qfrac = frac_times(two_m_c1, lp);  // [0, 1)
      const double t = qfrac - p.k;
      const double tfloor = std::floor(t);
      double phi = t - tfloor;
      std::int64_t n0 = static_cast<std::int64_t>(qint) + static_cast<std::int64_t>(tfloor);
      if (phi >= 1.0) {
        phi -= 1.0;
        n0 += 1;
      }
      auto it = comb_cache.find(phi);
      if (it == comb_cache.end()) it = comb_cache.emplace(phi, gw_comb(win, M, phi)).first;
      const cvec& G = it->second;

      const double c1ph = frac_times(g.c1, static_cast<std::int64_t>(lp) * lp);
      const cplx coef = p.h * gt * std::polar(1.0, 2.0 * std::numbers::pi * c1ph);

      for (int mp = cols.lo; mp < cols.hi; ++mp) {
        // exp(-j 2 pi m' l' / M), reduced mod M in integer arithmetic
        std::int64_t q = (static_cast<std::int64_t>(mp) * lp) % M;
        if (q < 0) q += M;
        const cplx alpha =
            coef * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(q) / M);
        std::int64_t idx = (rows.lo - mp + n0) % M;
        if (idx < 0) idx += M;
        cplx* colptr = H.m.col(mp - cols.lo).data();
        for (int m = rows.lo; m < rows.hi; ++m) {
          colptr[m - rows.lo] += alpha * G[static_cast<std::size_t>(idx)];
          if (++idx == M) idx = 0;
        }
      }
    }
  }

  // Pre/post chirp phases factor out of the accumulation entirely.
  if (!g.c2.is_zero()) {
    for (int m = rows.lo; m < rows.hi; ++m) {
      const double ph = frac_times(g.c2, static_cast<std::int64_t>(m) * m);
      H.m.row(m - rows.lo) *= std::polar(1.0, -2.0 * std::numbers::pi * ph);
    }
    for (int mp = cols.lo; mp < cols.hi; ++mp) {
      const double ph = frac_times(g.c2, static_cast<std::int64_t>(mp) * mp);
      H.m.col(mp - cols.lo) *= std::polar(1.0, 2.0 * std::numbers::pi * ph);
    }
  }
  return H;
}

// Full M x M effective channel matrix.
inline ChannelMatrix build_h(const ValidatedConfig& vc, const ChannelRealization& chan,
                             const SampledPulse& g_t, const Window& win) {
  const int M = vc.grid().M;
  return build_h_block(vc, chan, g_t, win, {0, M}, {0, M});
}

// Single-entry reference evaluation (the literal triple sum with lazy g_W).
// The comb-based builder is tested against this.
inline cplx h_entry_reference(const ValidatedConfig& vc, const ChannelRealization& chan,
                              const SampledPulse& g_t, const Window& win, int m, int mp) {
  const GridConfig& g = vc.grid();
  const int M = g.M;
  const int hs = vc.cfg().filter_halfspan;
  const double two_m_c1 = (g.c1 * (2 * static_cast<std::int64_t>(M))).value();
  cplx acc{0.0, 0.0};
  for (const auto& p : chan.paths) {
    const int b_lo = static_cast<int>(std::floor(p.ell)) - hs;
    const int b_hi = static_cast<int>(std::ceil(p.ell)) + hs;
    for (int lp = b_lo; lp <= b_hi; ++lp) {
      const double gt = sample_gt(g_t, static_cast<double>(lp) - p.ell);
      if (gt == 0.0) continue;
      const double ph = frac_times(g.c1, static_cast<std::int64_t>(lp) * lp) +
                        frac_times(g.c2, static_cast<std::int64_t>(mp) * mp) -
                        frac_times(g.c2, static_cast<std::int64_t>(m) * m) -
                        static_cast<double>((static_cast<std::int64_t>(mp) * lp) % M) / M;
      const double f = m - mp + two_m_c1 * lp - p.k;
      acc += p.h * gt * std::polar(1.0, 2.0 * std::numbers::pi * ph) * eval_gw(win, f, M);
    }
  }
  return acc;
}

// Rows/columns restricted to the scheduled range.
inline ChannelMatrix scheduled_submatrix(const ChannelMatrix& H, const GridConfig& grid) {
  ChannelMatrix out;
  out.row0 = grid.schd_lo;
  out.col0 = grid.schd_lo;
  out.tag = H.tag;
  out.m = H.m.block(grid.schd_lo - H.row0, grid.schd_lo - H.col0, grid.scheduled_count(),
                    grid.scheduled_count());
  return out;
}

// sigma_max / sigma_min via full SVD; +inf when the matrix is numerically
// singular so sweep tables stay rectangular.
inline double condition_number(const MatrixXc& H) {
  if (H.rows() != H.cols()) throw NotSquare("condition_number: matrix is not square");
  if (H.rows() == 0) throw NotSquare("condition_number: empty matrix");
  Eigen::BDCSVD<MatrixXc> svd(H);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (smin < 1e-300) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

inline double condition_number(const ChannelMatrix& H) { return condition_number(H.m); }

struct NoiseCovariance {
  MatrixXc R;                        // M x M Hermitian PSD
  std::vector<std::string> factors;  // transform chain actually applied
};

// R_w = (C2 F_M S W B C1) R_n (.)^H. R_n is (M + L_D + L_W) square; the
// window's own support determines how much prefix the chain retains (D =
// win.D), matching what demodulate_frame does for each mode.
inline NoiseCovariance build_noise_covariance(const ValidatedConfig& vc, const Window& win,
                                              const MatrixXc& R_n) {
  const GridConfig& g = vc.grid();
  const int M = g.M;
  const int N = g.frame_len();
  const int D = win.D;
  if (R_n.rows() != N || R_n.cols() != N)
    throw DimensionMismatch("build_noise_covariance: R_n must be (M+L_D+L_W) square");
  if (win.M != M || D > g.prefix_len())
    throw DimensionMismatch("build_noise_covariance: window incompatible with grid");

  NoiseCovariance out;
  MatrixXc R = R_n;

  // C1: diagonal chirp over signed l in [-(L_D+L_W), M)
  {
    VectorXc d(N);
    for (int i = 0; i < N; ++i) {
      const std::int64_t l = i - g.prefix_len();
      d(i) = std::polar(1.0, -2.0 * std::numbers::pi * frac_times(g.c1, l * l));
    }
    R = d.asDiagonal() * R * d.conjugate().asDiagonal();
    out.factors.push_back("C1");
  }
  // B: drop the removed-prefix rows/columns
  {
    const int keep = M + D;
    R = R.block(N - keep, N - keep, keep, keep).eval();
    out.factors.push_back("B");
  }
  // W: receive window
  {
    VectorXc d(M + D);
    for (int i = 0; i < M + D; ++i) d(i) = win.at(i - D);
    R = d.asDiagonal() * R * d.conjugate().asDiagonal();
    out.factors.push_back("W");
  }
  // S: overlap-summation (two-block fold)
  {
    MatrixXc F = MatrixXc::Zero(M, M);
    auto fold_cols = [&](int a) {
      // columns of R contributing to r3[a]
      std::vector<int> c{a + D};
      if (a >= M - D) c.push_back(a + D - M);
      return c;
    };
    for (int a = 0; a < M; ++a) {
      for (int b = 0; b < M; ++b) {
        cplx acc{0.0, 0.0};
        for (int u : fold_cols(a))
          for (int v : fold_cols(b)) acc += R(u, v);
        F(a, b) = acc;
      }
    }
    R = std::move(F);
    out.factors.push_back("S");
  }
  // F_M: unitary DFT congruence via per-column/per-row transforms
  {
    for (int c = 0; c < M; ++c) {
      cvec col(static_cast<std::size_t>(M));
      for (int r = 0; r < M; ++r) col[static_cast<std::size_t>(r)] = R(r, c);
      col = fft_unitary(std::move(col));
      for (int r = 0; r < M; ++r) R(r, c) = col[static_cast<std::size_t>(r)];
    }
    for (int r = 0; r < M; ++r) {
      cvec row(static_cast<std::size_t>(M));
      for (int c = 0; c < M; ++c) row[static_cast<std::size_t>(c)] = R(r, c);
      row = ifft_unitary(std::move(row));
      for (int c = 0; c < M; ++c) R(r, c) = row[static_cast<std::size_t>(c)];
    }
    out.factors.push_back("F_M");
  }
  // C2: de-prechirp diagonal
  if (!g.c2.is_zero()) {
    VectorXc d(M);
    for (int m = 0; m < M; ++m)
      d(m) = std::polar(1.0, -2.0 * std::numbers::pi *
                                 frac_times(g.c2, static_cast<std::int64_t>(m) * m));
    R = d.asDiagonal() * R * d.conjugate().asDiagonal();
  }
  out.factors.push_back("C2");

  out.R = std::move(R);
  return out;
}

}  // namespace afdm
