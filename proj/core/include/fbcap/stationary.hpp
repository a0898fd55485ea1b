#ifndef FBCAP_STATIONARY_HPP
#define FBCAP_STATIONARY_HPP

#include "fbcap/kalman.hpp"

namespace fbcap {

/// Best stationary feedback-dependent source found for a power budget P:
/// maximizes the per-use rate over (d, e) subject to d^T K d + e^2 = P with
/// K the steady-state filter covariance for that (d, e).
struct StationaryResult {
  Vector d;
  double e = 0.0;
  Matrix K;
  double I_max_nats = 0.0;
  double I_max_bits = 0.0;
  double P = 0.0;
  double riccati_residual = 0.0;  // ||K - cov_update(K)||_F
  double power_residual = 0.0;    // d^T K d + e^2 - P
};

/// Closed-form first-order (L = 1) stationary optimum. For a + c != 0 the
/// solution has e = 0, d = (a+c)/eta with eta the largest positive root of
///   (P/s2) eta^4 + 2 (P/s2) eta^3 + (P/s2 + 1 - a^2) eta^2
///     - 2 a (a+c) eta - (a+c)^2 = 0,    s2 = sigma_w2,
/// K = P/d^2 and I_max = 1/2 log2(1 + (1+eta)^2 P / s2).
///
/// a + c = 0 cancels the noise filter entirely (plain AWGN); that branch
/// returns d = 0, e = sqrt(P), eta = 0 and the Shannon rate, with K the
/// matching steady-state filter variance.
struct FirstOrderResult {
  double eta = 0.0;
  double d = 0.0;
  double K = 0.0;
  double e = 0.0;
  double I_max_bits = 0.0;
  double quartic_residual = 0.0;
  bool awgn_branch = false;
};

struct ButmanResult {
  double chi = 0.0;  // root > 1 of chi^2 = 1 + (P/s2) ((chi+|c|)/chi)^2
  double I_max_bits = 0.0;  // log2(chi)
};

/// Riccati-constrained nonlinear program for the stationary rate, solved by
/// simplex descent over (direction of d, power split rho) with the power
/// equality enforced by construction: d^T K d = rho P and e^2 = (1-rho) P.
/// Deterministic for the fixed built-in restart seeds.
StationaryResult solve_stationary(const ChannelModel& model, double P);

/// First-order closed form; requires -1 < a < 1, -1 < c < 1, P > 0.
FirstOrderResult first_order_rate(double a, double c, double sigma_w2,
                                  double P);

/// Rate of the recursive linear feedback code for first-order AR noise
/// (a = 0, c != 0), solved by bisection. Agrees with first_order_rate at
/// a = 0 through the identity chi = c / eta.
ButmanResult butman_ar1_rate(double c, double sigma_w2, double P);

/// Evaluates the first-order quartic at eta (descending coefficients as
/// above); exposed so tests can check residuals independently.
double first_order_quartic(double a, double c, double sigma_w2, double P,
                           double eta);

}  // namespace fbcap

#endif  // FBCAP_STATIONARY_HPP
