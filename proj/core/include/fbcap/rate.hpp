#ifndef FBCAP_RATE_HPP
#define FBCAP_RATE_HPP

#include "fbcap/kalman.hpp"

namespace fbcap {

inline constexpr double kNatsPerBit = 0.6931471805599453094;  // ln 2

inline double nats_to_bits(double nats) { return nats / kNatsPerBit; }

/// Lagrange multiplier trading information against transmit power.
/// gamma = 0 corresponds to an unbounded power budget and is rejected.
struct ShadowPrice {
  double gamma;
  explicit ShadowPrice(double g);
};

/// Per-use information of one stage, in nats:
///   1/2 ln( (sigma_w2 + phi^T K phi + e^2) / sigma_w2 ),  phi = a + c + d.
double stage_rate(const ChannelModel& model, const Matrix& K,
                  const PolicyStage& stage);

/// Per-use transmit power of one centered stage: d^T K d + e^2. Centering
/// removes the (d^T m + g)^2 term, so the mean never enters.
double stage_power(const ChannelModel& model, const Matrix& K,
                   const PolicyStage& stage);
double stage_power(const ChannelModel& model, const Posterior& post,
                   const PolicyStage& stage);

/// Power of an uncentered stage with explicit offset g:
///   (d^T m + g)^2 + d^T K d + e^2.
/// Kept only so tests can confirm that g = -d^T m minimizes power at equal
/// rate; production paths always center.
double stage_power_uncentered(const ChannelModel& model, const Posterior& post,
                              const PolicyStage& stage, double g);

/// Lagrangian stage reward: stage_rate - gamma * stage_power (nats).
double reward_omega(const ChannelModel& model, const Matrix& K,
                    const PolicyStage& stage, const ShadowPrice& price);
double reward_omega(const ChannelModel& model, const Posterior& post,
                    const PolicyStage& stage, const ShadowPrice& price);

}  // namespace fbcap

#endif  // FBCAP_RATE_HPP
