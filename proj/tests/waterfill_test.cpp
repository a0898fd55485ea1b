#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fbcap/channel.hpp"
#include "fbcap/errors.hpp"
#include "fbcap/waterfill.hpp"

using namespace fbcap;

TEST_CASE("waterfill_capacity: two-mode hand example") {
  // nP + r1 + r2 = 6 does not strictly exceed 2 r2 = 6, so only one mode
  // is active: C = (1/4) log2(3).
  const auto r = waterfill_capacity({1.0, 3.0}, 1.0);
  CHECK(r.k == 1);
  CHECK(r.capacity_bits ==
        doctest::Approx(0.25 * std::log2(3.0)).epsilon(1e-14));
  CHECK(r.capacity_bits == doctest::Approx(0.39624).epsilon(1e-4));
}

TEST_CASE("waterfill_capacity: white noise fills every mode") {
  const auto r = waterfill_capacity({1.0, 1.0, 1.0, 1.0}, 1.0);
  CHECK(r.k == 4);
  CHECK(r.capacity_bits == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("waterfill_capacity: permutation invariance") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  std::vector<double> eigs(12);
  for (auto& x : eigs) x = u(rng);
  const auto base = waterfill_capacity(eigs, 0.7);
  for (int rep = 0; rep < 10; ++rep) {
    std::shuffle(eigs.begin(), eigs.end(), rng);
    const auto shuffled = waterfill_capacity(eigs, 0.7);
    CHECK(shuffled.capacity_bits == base.capacity_bits);
    CHECK(shuffled.k == base.k);
  }
}

TEST_CASE("waterfill_capacity: nondecreasing in P and high-power slope") {
  std::vector<double> eigs{0.3, 0.9, 2.7, 8.1};
  double prev = -1.0;
  for (double P : {0.1, 0.3, 1.0, 3.0, 10.0}) {
    const auto r = waterfill_capacity(eigs, P);
    CHECK(r.capacity_bits >= prev);
    prev = r.capacity_bits;
  }
  const double P = 1e12;
  const auto r = waterfill_capacity(eigs, P);
  CHECK(r.k == 4);
  CHECK(r.capacity_bits / std::log2(P) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("waterfill_capacity: validation") {
  CHECK_THROWS_AS(waterfill_capacity({}, 1.0), ConfigError);
  CHECK_THROWS_AS(waterfill_capacity({1.0, -0.5}, 1.0), ConfigError);
  CHECK_THROWS_AS(waterfill_capacity({1.0, 0.0}, 1.0), ConfigError);
  CHECK_THROWS_AS(waterfill_capacity({1.0}, 0.0), ConfigError);
}

TEST_CASE("noise_cov_matrix: white noise and AR(1) closed forms") {
  const ChannelModel white = build_model(std::vector<double>{0.0}, {0.0}, 2.0);
  const Matrix Kw = noise_cov_matrix(white, 3);
  CHECK((Kw - 2.0 * Matrix::Identity(3, 3)).norm() <= 1e-9);

  const double c = 0.95;
  const ChannelModel m = build_model(std::vector<double>{0.0}, {c}, 1.0);
  const Matrix K = noise_cov_matrix(m, 2);
  const double r0 = 1.0 / (1.0 - c * c);
  CHECK(K(0, 0) == doctest::Approx(r0).epsilon(1e-9));
  CHECK(K(0, 1) == doctest::Approx(-c * r0).epsilon(1e-9));
  CHECK(K(1, 0) == K(0, 1));  // bit-exact symmetry by construction

  const Matrix K5 = noise_cov_matrix(m, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) CHECK(K5(i, j) == K5(j, i));
  for (int i = 0; i + 1 < 5; ++i)
    CHECK(K5(i, i) == K5(i + 1, i + 1));  // Toeplitz bit-exact

  CHECK_THROWS_AS(noise_cov_matrix(m, 0), ConfigError);
}

TEST_CASE("feedforward_capacity: white equals the memoryless formula") {
  const ChannelModel white = build_model(std::vector<double>{0.0}, {0.0}, 1.0);
  for (int n : {1, 8, 32}) {
    const auto r = feedforward_capacity(white, n, 1.0);
    CHECK(r.capacity_bits == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(r.k == n);
  }
}

TEST_CASE("feedforward_capacity: n = 1 is the single-mode formula") {
  const ChannelModel m = build_model(std::vector<double>{0.0}, {0.95}, 1.0);
  const double r0 = noise_autocovariance(m, 0)[0];
  const auto r = feedforward_capacity(m, 1, 1.0);
  CHECK(r.capacity_bits ==
        doctest::Approx(0.5 * std::log2(1.0 + 1.0 / r0)).epsilon(1e-12));
}

TEST_CASE("feedforward_capacity: eigenvalues sorted and positive") {
  const ChannelModel m =
      build_model(std::vector<double>{0.0, 0.6, 0.4}, {0.5, 0.4, 0.0}, 1.0);
  const auto r = feedforward_capacity(m, 32, 1.0);
  CHECK(static_cast<int>(r.eigenvalues.size()) == 32);
  CHECK(std::is_sorted(r.eigenvalues.begin(), r.eigenvalues.end()));
  CHECK(r.eigenvalues.front() > 0.0);
  CHECK(r.k >= 1);
  CHECK(r.k <= 32);
}
