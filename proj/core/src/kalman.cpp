#include "fbcap/kalman.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "fbcap/errors.hpp"

namespace fbcap {

namespace {

constexpr double kPsdClampFloor = -1e-10;

// Symmetrize, then clamp eigenvalues in [kPsdClampFloor, 0) to zero. More
// negative eigenvalues are not roundoff and raise InternalInconsistency.
Matrix symmetrize_and_clamp(Matrix K) {
  K = ((K + K.transpose()) * 0.5).eval();
  if (K.size() == 0) return K;
  Eigen::SelfAdjointEigenSolver<Matrix> probe(K, Eigen::EigenvaluesOnly);
  const double scale =
      std::max(1.0, probe.eigenvalues().cwiseAbs().maxCoeff());
  const double min_eig = probe.eigenvalues().minCoeff();
  if (min_eig >= 0.0) return K;
  if (min_eig < kPsdClampFloor * scale) {
    std::ostringstream msg;
    msg << "cov_update: covariance lost positive semidefiniteness (min "
           "eigenvalue "
        << min_eig << ")";
    throw InternalInconsistency(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(K);
  Vector clamped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clamped.asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

KalmanTerms kalman_terms(const ChannelModel& model, const Matrix& K,
                         const PolicyStage& stage) {
  KalmanTerms t;
  t.Q = model.A + model.b * stage.d.transpose();
  t.phi = model.a_plus_c + stage.d;
  const double e2 = stage.e * stage.e;
  t.delta = t.phi.dot(K * t.phi) + e2 + model.sigma_w2;
  t.v = t.Q * (K * t.phi) + model.b * e2;
  return t;
}

Matrix cov_update(const ChannelModel& model, const Matrix& K,
                  const PolicyStage& stage) {
  const KalmanTerms t = kalman_terms(model, K, stage);
  const double e2 = stage.e * stage.e;
  Matrix next = t.Q * K * t.Q.transpose() +
                (model.b * model.b.transpose()) * e2 -
                (t.v * t.v.transpose()) / t.delta;
  return symmetrize_and_clamp(std::move(next));
}

Vector mean_update(const ChannelModel& model, const Posterior& post,
                   const PolicyStage& stage, double y) {
  const KalmanTerms t = kalman_terms(model, post.K, stage);
  const double innovation = y - model.a_plus_c.dot(post.m);
  return model.A * post.m + t.v * (innovation / t.delta);
}

double predicted_output(const ChannelModel& model, const Posterior& post) {
  return model.a_plus_c.dot(post.m);
}

double riccati_residual(const ChannelModel& model, const Matrix& K,
                        const PolicyStage& stage) {
  return (K - cov_update(model, K, stage)).norm();
}

Matrix riccati_fixed_point(const ChannelModel& model, const PolicyStage& stage,
                           double tol, int max_iter) {
  const int L = model.order;
  Matrix K;
  if (stage.e != 0.0) {
    K = (model.b * model.b.transpose()) * (stage.e * stage.e);
  } else {
    K = Matrix::Identity(L, L) * model.sigma_w2;
  }
  double residual = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Matrix next = cov_update(model, K, stage);
    residual = (K - next).norm();
    K = std::move(next);
    if (residual <= tol * std::max(1.0, K.norm())) return K;
  }
  std::ostringstream msg;
  msg << "riccati_fixed_point: no steady state after " << max_iter
      << " iterations (residual " << residual << ")";
  throw NonConvergent(msg.str(), residual);
}

}  // namespace fbcap
