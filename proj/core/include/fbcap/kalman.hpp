#ifndef FBCAP_KALMAN_HPP
#define FBCAP_KALMAN_HPP

#include "fbcap/channel.hpp"

namespace fbcap {

/// Gaussian posterior of the channel state given past outputs: mean m and
/// covariance K. K must be symmetric PSD (tiny negative eigenvalues from
/// roundoff are tolerated up to 1e-10).
struct Posterior {
  Vector m;
  Matrix K;
};

/// One stage of the feedback-dependent source x = d^T (s - m) + e z with
/// z ~ N(0,1). The centering offset is implied (g = -d^T m), so a stage is
/// fully described by the gain vector d and the innovation amplitude e >= 0
/// (the sign of e carries no information).
struct PolicyStage {
  Vector d;
  double e = 0.0;
};

/// Terms shared by the covariance and mean updates for a given (K, stage):
///   Q     = A + b d^T              (closed-loop state matrix)
///   phi   = a + c + d
///   delta = phi^T K phi + e^2 + sigma_w2   (output prediction variance)
///   v     = Q K phi + b e^2                (state/output cross covariance)
struct KalmanTerms {
  Matrix Q;
  Vector phi;
  Vector v;
  double delta = 0.0;
};

KalmanTerms kalman_terms(const ChannelModel& model, const Matrix& K,
                         const PolicyStage& stage);

/// Covariance propagation K' = Q K Q^T + b b^T e^2 - v v^T / delta.
/// The result is symmetrized and eigenvalues in [-1e-10, 0) are clamped to
/// zero; anything more negative throws InternalInconsistency since the exact
/// map preserves positive semidefiniteness.
Matrix cov_update(const ChannelModel& model, const Matrix& K,
                  const PolicyStage& stage);

/// Mean propagation for the centered source. The one-step output prediction
/// is y_hat = (a+c)^T m (the d-terms cancel under centering), so
///   m' = A m + v (y - y_hat) / delta.
Vector mean_update(const ChannelModel& model, const Posterior& post,
                   const PolicyStage& stage, double y);

/// Predicted output E[Y | past] = (a+c)^T m for the centered source.
double predicted_output(const ChannelModel& model, const Posterior& post);

/// Steady-state covariance of the filter under a fixed stage, found by
/// iterating cov_update. The natural seed is e^2 b b^T (the covariance
/// injected by the first innovation); when e = 0 that seed is the degenerate
/// all-zero fixed point, so sigma_w2 * I is used instead to reach the stable
/// fixed point the stationary analysis refers to.
///
/// Convergence criterion: ||K - cov_update(K)||_F <= tol * max(1, ||K||_F).
/// Throws NonConvergent after max_iter iterations; policies without a steady
/// state do exist and callers are expected to handle this.
Matrix riccati_fixed_point(const ChannelModel& model, const PolicyStage& stage,
                           double tol = 1e-12, int max_iter = 100000);

/// Frobenius norm of K - cov_update(K); diagnostic for how close K is to a
/// steady state.
double riccati_residual(const ChannelModel& model, const Matrix& K,
                        const PolicyStage& stage);

}  // namespace fbcap

#endif  // FBCAP_KALMAN_HPP
