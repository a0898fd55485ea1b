#include "fbcap/waterfill.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "fbcap/errors.hpp"

namespace fbcap {

Matrix noise_cov_matrix(const ChannelModel& model, int n) {
  if (n < 1) throw ConfigError("noise_cov_matrix: n must be >= 1");
  const std::vector<double> r = noise_autocovariance(model, n - 1);
  Matrix K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) K(i, j) = r[static_cast<size_t>(std::abs(i - j))];
  return K;
}

WaterfillResult waterfill_capacity(std::vector<double> eigenvalues, double P) {
  if (eigenvalues.empty())
    throw ConfigError("waterfill_capacity: no eigenvalues given");
  if (!std::isfinite(P) || P <= 0.0)
    throw ConfigError("waterfill_capacity: P must be finite and > 0");
  for (double r : eigenvalues)
    if (!(r > 0.0) || !std::isfinite(r))
      throw ConfigError("waterfill_capacity: eigenvalues must be positive");

  std::sort(eigenvalues.begin(), eigenvalues.end());
  const int n = static_cast<int>(eigenvalues.size());
  const double nP = n * P;

  int k = 0;
  double prefix = 0.0, active_sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    prefix += eigenvalues[i - 1];
    const double lhs = nP + prefix;
    const double rhs = i * eigenvalues[i - 1];
    const double guard = 1e-12 * std::max({1.0, lhs, rhs});
    if (lhs > rhs + guard) {
      k = i;
      active_sum = prefix;
    }
  }

  WaterfillResult out;
  out.n = n;
  out.eigenvalues = std::move(eigenvalues);
  out.k = k;
  const double level_num = nP + active_sum;  // k * water level
  double bits = 0.0;
  for (int i = 0; i < k; ++i)
    bits += std::log2(level_num / (k * out.eigenvalues[static_cast<size_t>(i)]));
  out.capacity_bits = bits / (2.0 * n);
  return out;
}

WaterfillResult feedforward_capacity(const ChannelModel& model, int n,
                                     double P) {
  const Matrix K = noise_cov_matrix(model, n);
  Eigen::SelfAdjointEigenSolver<Matrix> es(K, Eigen::EigenvaluesOnly);
  const double floor = 1e-8 * K(0, 0);
  std::vector<double> eigs(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) eigs[static_cast<size_t>(i)] = std::max(es.eigenvalues()(i), floor);
  return waterfill_capacity(std::move(eigs), P);
}

}  // namespace fbcap
