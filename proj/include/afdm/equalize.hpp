// equalize.hpp - LMMSE detection with colored noise
//
// x_hat = Es H^H (Es H H^H + R_w)^{-1} y, solved through an LDLT
// factorization rather than an explicit inverse. H may be rectangular: the
// equalizer routinely works on the full-receive-rows by scheduled-columns
// system, where path delays shift the data block elsewhere in the DAFT grid.

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "afdm/channel_matrix.hpp"
#include "afdm/signal.hpp"

namespace afdm {

struct SolveFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class LmmseEqualizer {
 public:
  // H: N_rows x N_cols, R_w: N_rows square PSD.
  LmmseEqualizer(const MatrixXc& H, const MatrixXc& R_w, double Es) : H_(H), Es_(Es) {
    if (R_w.rows() != H.rows() || R_w.cols() != H.rows())
      throw DimensionMismatch("LmmseEqualizer: R_w size does not match H rows");
    if (Es <= 0) throw std::invalid_argument("LmmseEqualizer: Es must be positive");
    MatrixXc A = Es * (H * H.adjoint()) + R_w;
    ldlt_.compute(A);
    if (ldlt_.info() != Eigen::Success)
      throw SolveFailure("LmmseEqualizer: factorization failed");
  }

  VectorXc equalize(const VectorXc& y) const {
    if (y.size() != H_.rows()) throw DimensionMismatch("LmmseEqualizer: y size mismatch");
    VectorXc z = ldlt_.solve(y);
    if (!z.allFinite()) throw SolveFailure("LmmseEqualizer: singular system");
    return Es_ * (H_.adjoint() * z);
  }

 private:
  MatrixXc H_;
  double Es_;
  Eigen::LDLT<MatrixXc> ldlt_;
};

inline cvec lmmse_equalize(const cvec& y, const MatrixXc& H, const MatrixXc& R_w, double Es) {
  if (static_cast<Eigen::Index>(y.size()) != H.rows())
    throw DimensionMismatch("lmmse_equalize: y size does not match H rows");
  LmmseEqualizer eq(H, R_w, Es);
  VectorXc yv = Eigen::Map<const VectorXc>(y.data(), static_cast<Eigen::Index>(y.size()));
  VectorXc x = eq.equalize(yv);
  return cvec(x.data(), x.data() + x.size());
}

}  // namespace afdm
