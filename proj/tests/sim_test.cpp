#include <doctest.h>

#include <cmath>

#include "fbcap/channel.hpp"
#include "fbcap/errors.hpp"
#include "fbcap/kalman.hpp"
#include "fbcap/rate.hpp"
#include "fbcap/sim.hpp"
#include "fbcap/stationary.hpp"

using namespace fbcap;

namespace {

PolicyStage scalar_stage(double d, double e) {
  return PolicyStage{Vector::Constant(1, d), e};
}

}  // namespace

TEST_CASE("simulate: validation") {
  const ChannelModel m = build_model(std::vector<double>{0.0}, {0.95}, 1.0);
  CHECK_THROWS_AS(simulate(m, scalar_stage(0.0, 1.0), 50, 1), ConfigError);
  CHECK_THROWS_AS(simulate(m, std::vector<PolicyStage>{}, 1000, 1),
                  ConfigError);
  CHECK_THROWS_AS(simulate(m, PolicyStage{Vector::Zero(2), 1.0}, 1000, 1),
                  ConfigError);
  CHECK_THROWS_AS(simulate(m, scalar_stage(0.0, -1.0), 1000, 1), ConfigError);
}

TEST_CASE("simulate: identical seeds replay bit-identically") {
  const ChannelModel m = build_model(std::vector<double>{0.5}, {0.95}, 1.0);
  const PolicyStage stage = scalar_stage(0.6, 0.8);
  const SimReport a = simulate(m, stage, 2000, 987654);
  const SimReport b = simulate(m, stage, 2000, 987654);
  CHECK(a.empirical_power == b.empirical_power);
  CHECK(a.empirical_rate_bits == b.empirical_rate_bits);
  CHECK(a.innovation_variance == b.innovation_variance);
  CHECK(a.innovation_lag1_autocorr == b.innovation_lag1_autocorr);
  CHECK((a.state_error_cov - b.state_error_cov).norm() == 0.0);
  CHECK(a.rng == "mt19937_64+box-muller");

  const SimReport c = simulate(m, stage, 2000, 987655);
  CHECK(c.empirical_power != a.empirical_power);
}

TEST_CASE("simulate: white-noise source at unit power") {
  const ChannelModel m = build_model(std::vector<double>{0.0}, {0.0}, 1.0);
  const SimReport r = simulate(m, scalar_stage(0.0, 1.0), 100000, 11);
  CHECK(std::abs(r.empirical_power - 1.0) <= 3.0 * r.empirical_power_stderr);
  CHECK(std::abs(r.empirical_rate_bits - 0.5) <= 0.01);
  CHECK(r.k_converged);
}

TEST_CASE("simulate: stationary first-order feedback source") {
  const ChannelModel m = build_model(std::vector<double>{0.0}, {0.95}, 1.0);
  const auto fo = first_order_rate(0.0, 0.95, 1.0, 1.0);
  const PolicyStage stage = scalar_stage(fo.d, 0.0);
  const SimReport r = simulate(m, stage, 100000, 31);
  CHECK(r.init == "stationary");
  CHECK(std::abs(r.empirical_power - 1.0) <= 3.0 * r.empirical_power_stderr);
  CHECK(std::abs(r.empirical_rate_bits - fo.I_max_bits) <= 0.01);
  CHECK(std::abs(r.state_error_cov(0, 0) - fo.K) <= 0.05 * fo.K);
  CHECK(r.k_traj_mismatch <= 0.05);
  CHECK(std::abs(r.innovation_lag1_autocorr) <=
        3.0 / std::sqrt(static_cast<double>(r.steps)));
  // Empirical power against the population value d^T K d + e^2.
  const Matrix K = riccati_fixed_point(m, stage);
  const double pop = stage_power(m, K, stage);
  CHECK(std::abs(r.empirical_power - pop) <= 3.0 * r.empirical_power_stderr);
}

TEST_CASE("simulate: silent source measures nothing") {
  const ChannelModel m = build_model(std::vector<double>{0.0}, {0.95}, 1.0);
  const SimReport r = simulate(m, scalar_stage(0.0, 0.0), 10000, 7);
  CHECK(r.empirical_power == 0.0);
  CHECK(std::abs(r.empirical_rate_bits) <= 0.01);
}

TEST_CASE("simulate: schedules start from the known state") {
  const ChannelModel m = build_model(std::vector<double>{0.0}, {0.95}, 1.0);
  const auto fo = first_order_rate(0.0, 0.95, 1.0, 1.0);
  std::vector<PolicyStage> schedule{scalar_stage(0.0, 1.0),
                                    scalar_stage(fo.d, 0.0)};
  // The last stage persists beyond the schedule end.
  const SimReport r = simulate(m, schedule, 100000, 5);
  CHECK(r.init == "known-state");
  CHECK(r.k_converged);
  CHECK(std::abs(r.empirical_rate_bits - fo.I_max_bits) <= 0.02);
}

TEST_CASE("simulate: explicit known-state init for a single stage") {
  const ChannelModel m = build_model(std::vector<double>{0.0}, {0.95}, 1.0);
  const SimReport r =
      simulate(m, scalar_stage(0.4, 1.0), 20000, 3, SimInit::kKnownState);
  CHECK(r.init == "known-state");
  CHECK(r.empirical_power > 0.5);
}

TEST_CASE("simulate: innovation variance matches the prediction variance") {
  // Var(innovation) = phi^T K phi + e^2 + s2 at stationarity.
  const ChannelModel m = build_model(std::vector<double>{0.5}, {0.95}, 1.0);
  const PolicyStage stage = scalar_stage(0.8, 0.5);
  const Matrix K = riccati_fixed_point(m, stage);
  const KalmanTerms terms = kalman_terms(m, K, stage);
  const SimReport r = simulate(m, stage, 200000, 17);
  CHECK(r.innovation_variance ==
        doctest::Approx(terms.delta).epsilon(0.03));
}
