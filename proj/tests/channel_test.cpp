#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "fbcap/channel.hpp"
#include "fbcap/errors.hpp"

using namespace fbcap;

namespace {

ChannelModel ar1(double c, double s2 = 1.0) {
  return build_model(std::vector<double>{0.0}, {c}, s2);
}

}  // namespace

TEST_CASE("build_model: degenerate white-noise forms") {
  const ChannelModel m = build_model(std::vector<double>{0.0}, {0.0}, 1.0);
  CHECK(m.order == 1);
  CHECK(m.A(0, 0) == 0.0);
  CHECK(m.b(0) == 1.0);
  CHECK_FALSE(m.unit_circle_zero_warning);

  const ChannelModel empty = build_model(std::vector<double>{}, {}, 2.0);
  CHECK(empty.order == 0);
  CHECK(empty.A.rows() == 0);
}

TEST_CASE("build_model: first-order root bookkeeping") {
  const ChannelModel m = build_model(std::vector<double>{0.5}, {0.95}, 1.0);
  REQUIRE(m.zero_radii.size() == 1);
  REQUIRE(m.pole_radii.size() == 1);
  CHECK(m.zero_radii[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.pole_radii[0] == doctest::Approx(0.95).epsilon(1e-12));
  CHECK_FALSE(m.unit_circle_zero_warning);

  CHECK(m.A(0, 0) == 0.5);
  CHECK(m.a_plus_c(0) == doctest::Approx(1.45));
}

TEST_CASE("build_model: companion structure for L = 3") {
  const ChannelModel m =
      build_model(std::vector<double>{0.1, -0.2, 0.3}, {0.5, 0.4, 0.0}, 1.0);
  CHECK(m.A(0, 0) == 0.1);
  CHECK(m.A(0, 1) == -0.2);
  CHECK(m.A(0, 2) == 0.3);
  CHECK(m.A(1, 0) == 1.0);
  CHECK(m.A(2, 1) == 1.0);
  CHECK(m.A(1, 1) == 0.0);
  CHECK(m.A(2, 2) == 0.0);
  CHECK(m.b(1) == 0.0);
}

TEST_CASE("build_model: third-order example carries a unit-circle zero") {
  // Numerator z^3 - 0.6 z - 0.4 vanishes at z = 1.
  CHECK(std::abs(1.0 - 0.6 - 0.4) == 0.0);
  const ChannelModel m =
      build_model(std::vector<double>{0.0, 0.6, 0.4}, {0.5, 0.4, 0.0}, 1.0);
  CHECK(m.unit_circle_zero_warning);
  CHECK(m.zero_radii.back() == doctest::Approx(1.0).epsilon(1e-10));
  // Trailing zero in c reduces the effective AR order: one pole at origin.
  CHECK(m.pole_radii.front() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("build_model: rejections") {
  CHECK_THROWS_AS(build_model(std::vector<double>{0.0}, {1.2}, 1.0),
                  ConfigError);
  CHECK_THROWS_AS(build_model(std::vector<double>{0.0}, {1.0}, 1.0),
                  ConfigError);  // pole on the unit circle
  CHECK_THROWS_AS(build_model(std::vector<double>{1.5}, {0.0}, 1.0),
                  ConfigError);  // zero outside
  CHECK_THROWS_AS(build_model(std::vector<double>{0.0}, {0.5, 0.1}, 1.0),
                  ConfigError);  // length mismatch
  CHECK_THROWS_AS(build_model(std::vector<double>{0.0}, {0.0}, 0.0),
                  ConfigError);
  CHECK_THROWS_AS(build_model(std::vector<double>{0.0}, {0.0}, -1.0),
                  ConfigError);
  const double nan = std::nan("");
  CHECK_THROWS_AS(build_model(std::vector<double>{nan}, {0.0}, 1.0),
                  ConfigError);
}

TEST_CASE("noise_psd: white, AR(1) value, evenness, positivity") {
  const ChannelModel white = build_model(std::vector<double>{0.0}, {0.0}, 1.0);
  for (double w : {0.0, 0.3, 1.0, 3.0})
    CHECK(noise_psd(white, w) == doctest::Approx(1.0).epsilon(1e-14));

  const ChannelModel m = ar1(0.95);
  CHECK(noise_psd(m, 0.0) ==
        doctest::Approx(1.0 / (1.95 * 1.95)).epsilon(1e-12));

  const ChannelModel fig9 =
      build_model(std::vector<double>{0.0, 0.6, 0.4}, {0.5, 0.4, 0.0}, 1.0);
  for (const ChannelModel* model : {&m, &fig9}) {
    for (int j = 0; j < 4096; ++j) {
      const double w = -std::numbers::pi + 2 * std::numbers::pi * j / 4096.0;
      CHECK(noise_psd(*model, w) >= 0.0);
      CHECK(noise_psd(*model, w) ==
            doctest::Approx(noise_psd(*model, -w)).epsilon(1e-12));
    }
  }
}

TEST_CASE("noise_autocovariance: white noise") {
  const ChannelModel m = build_model(std::vector<double>{0.0}, {0.0}, 2.5);
  const auto r = noise_autocovariance(m, 4);
  CHECK(r[0] == doctest::Approx(2.5).epsilon(1e-12));
  for (int k = 1; k <= 4; ++k) CHECK(std::abs(r[k]) < 1e-9);
  CHECK_THROWS_AS(noise_autocovariance(m, -1), ConfigError);
}

TEST_CASE("noise_autocovariance: AR(1) closed form") {
  // N_t = W_t - c N_{t-1}: R(0) = s2/(1-c^2), R(k) = (-c)^k R(0).
  const double c = 0.95;
  const ChannelModel m = ar1(c);
  const auto r = noise_autocovariance(m, 6);
  const double r0 = 1.0 / (1.0 - c * c);
  for (int k = 0; k <= 6; ++k)
    CHECK(r[k] == doctest::Approx(std::pow(-c, k) * r0).epsilon(1e-9));
}

TEST_CASE("noise_autocovariance: MA(1) closed form") {
  const ChannelModel m = build_model(std::vector<double>{0.5}, {0.0}, 1.0);
  const auto r = noise_autocovariance(m, 4);
  CHECK(r[0] == doctest::Approx(1.25).epsilon(1e-10));
  CHECK(r[1] == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(std::abs(r[2]) < 1e-9);
  CHECK(std::abs(r[3]) < 1e-9);
}

TEST_CASE("noise power: PSD integral equals R(0)") {
  // Independent quadrature at an unrelated odd grid size.
  for (const ChannelModel& m :
       {ar1(0.95), build_model(std::vector<double>{0.5}, {0.95}, 1.0),
        build_model(std::vector<double>{0.0, 0.6, 0.4}, {0.5, 0.4, 0.0},
                    2.0)}) {
    const int N = 13313;
    double acc = 0.0;
    for (int j = 0; j < N; ++j)
      acc += noise_psd(m, -std::numbers::pi + 2 * std::numbers::pi * j / N);
    const double power = acc / N;
    const double r0 = noise_autocovariance(m, 0)[0];
    CHECK(power == doctest::Approx(r0).epsilon(1e-9));
  }
}

TEST_CASE("step_channel: hand values and affinity in x") {
  const ChannelModel m = build_model(std::vector<double>{0.5}, {0.95}, 1.0);
  ChannelState zero{Vector::Zero(1)};
  auto [s1, y1] = step_channel(m, zero, 0.0, 0.0);
  CHECK(s1.s(0) == 0.0);
  CHECK(y1 == 0.0);

  ChannelState one{Vector::Constant(1, 1.0)};
  auto [s2, y2] = step_channel(m, one, 2.0, 0.0);
  CHECK(s2.s(0) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(y2 == doctest::Approx(3.45).epsilon(1e-15));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 50; ++rep) {
    ChannelState s{Vector::Constant(1, u(rng))};
    const double x1 = u(rng), x2 = u(rng), w = u(rng);
    const double y_sum = step_channel(m, s, x1 + x2, w).second;
    const double y_split = step_channel(m, s, x1, w).second + x2;
    CHECK(y_sum == doctest::Approx(y_split).epsilon(1e-12));
  }
}

TEST_CASE("state-space noise construction matches the autocovariance") {
  // Simulate N_t = W_t - a1 W_{t-1} - c1 N_{t-1} directly and compare sample
  // autocovariances (batch-mean standard errors) with the quadrature values.
  const double a1 = 0.5, c1 = 0.8;
  const ChannelModel m = build_model(std::vector<double>{a1}, {c1}, 1.0);
  const auto r = noise_autocovariance(m, 5);

  const long long steps = 1000000;
  std::mt19937_64 rng(20240817);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> noise(steps);
  double w_prev = 0.0, n_prev = 0.0;
  for (long long t = 0; t < steps; ++t) {
    const double w = gauss(rng);
    const double n = w - a1 * w_prev - c1 * n_prev;
    noise[static_cast<size_t>(t)] = n;
    w_prev = w;
    n_prev = n;
  }
  const int kBatches = 100;
  const long long batch = steps / kBatches;
  for (int lag = 0; lag <= 5; ++lag) {
    std::vector<double> est(kBatches);
    for (int b = 0; b < kBatches; ++b) {
      double acc = 0.0;
      long long count = 0;
      for (long long t = b * batch; t + lag < (b + 1) * batch; ++t) {
        acc += noise[static_cast<size_t>(t)] *
               noise[static_cast<size_t>(t + lag)];
        ++count;
      }
      est[static_cast<size_t>(b)] = acc / static_cast<double>(count);
    }
    double mean = 0.0;
    for (double v : est) mean += v;
    mean /= kBatches;
    double var = 0.0;
    for (double v : est) var += (v - mean) * (v - mean);
    const double se = std::sqrt(var / (kBatches - 1) / kBatches);
    CHECK(std::abs(mean - r[static_cast<size_t>(lag)]) <= 3.0 * se);
  }
}

TEST_CASE("accepted models keep poles strictly inside the unit circle") {
  for (const ChannelModel& m :
       {ar1(0.95), build_model(std::vector<double>{0.5}, {0.95}, 1.0),
        build_model(std::vector<double>{0.0, 0.6, 0.4}, {0.5, 0.4, 0.0},
                    1.0)}) {
    for (double rad : m.pole_radii) CHECK(rad < 1.0);
    for (double rad : m.zero_radii) CHECK(rad <= 1.0 + 1e-12);
  }
}
