#include "fbcap/rate.hpp"

#include <cmath>

#include "fbcap/errors.hpp"

namespace fbcap {

ShadowPrice::ShadowPrice(double g) : gamma(g) {
  if (!std::isfinite(g) || g <= 0.0)
    throw ConfigError("shadow price gamma must be finite and > 0");
}

double stage_rate(const ChannelModel& model, const Matrix& K,
                  const PolicyStage& stage) {
  const Vector phi = model.a_plus_c + stage.d;
  const double excess = phi.dot(K * phi) + stage.e * stage.e;
  return 0.5 * std::log1p(excess / model.sigma_w2);
}

double stage_power(const ChannelModel& model, const Matrix& K,
                   const PolicyStage& stage) {
  (void)model;
  return stage.d.dot(K * stage.d) + stage.e * stage.e;
}

double stage_power(const ChannelModel& model, const Posterior& post,
                   const PolicyStage& stage) {
  return stage_power(model, post.K, stage);
}

double stage_power_uncentered(const ChannelModel& model, const Posterior& post,
                              const PolicyStage& stage, double g) {
  const double mean_term = stage.d.dot(post.m) + g;
  return mean_term * mean_term + stage_power(model, post.K, stage);
}

double reward_omega(const ChannelModel& model, const Matrix& K,
                    const PolicyStage& stage, const ShadowPrice& price) {
  return stage_rate(model, K, stage) -
         price.gamma * stage_power(model, K, stage);
}

double reward_omega(const ChannelModel& model, const Posterior& post,
                    const PolicyStage& stage, const ShadowPrice& price) {
  return reward_omega(model, post.K, stage, price);
}

}  // namespace fbcap
