#include "fbcap/sim.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

#include "fbcap/errors.hpp"
#include "fbcap/rate.hpp"

namespace fbcap {

namespace {

// Box-Muller over mt19937_64; kept explicit (rather than
// std::normal_distribution) so identical seeds replay bit-identically on
// every platform.
class GaussianSampler {
public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 =
        (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

Matrix psd_sqrt(const Matrix& K) {
  if (K.size() == 0) return K;
  Eigen::SelfAdjointEigenSolver<Matrix> es(K);
  const Vector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

// Streaming mean/variance (Welford).
struct RunningMoments {
  long long n = 0;
  double mean = 0.0, m2 = 0.0;
  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / (n - 1) : 0.0; }
  double stderr_of_mean() const {
    return n > 1 ? std::sqrt(variance() / n) : 0.0;
  }
};

}  // namespace

SimReport simulate(const ChannelModel& model,
                   const std::vector<PolicyStage>& schedule, long long steps,
                   std::uint64_t seed, SimInit init) {
  if (schedule.empty()) throw ConfigError("simulate: empty policy schedule");
  if (steps < 100) throw ConfigError("simulate: steps must be >= 100");
  for (const auto& stage : schedule) {
    if (stage.d.size() != model.order)
      throw ConfigError("simulate: policy dimension != channel order");
    if (!stage.d.allFinite() || !std::isfinite(stage.e) || stage.e < 0.0)
      throw ConfigError("simulate: non-finite or negative policy stage");
  }
  if (init == SimInit::kAuto)
    init = (schedule.size() == 1) ? SimInit::kStationary : SimInit::kKnownState;

  const int L = model.order;
  const double sigma_w = std::sqrt(model.sigma_w2);
  GaussianSampler gauss(seed);

  Vector s = Vector::Zero(L);
  Vector m = Vector::Zero(L);
  Matrix K = Matrix::Zero(L, L);
  if (init == SimInit::kStationary) {
    K = riccati_fixed_point(model, schedule.front());
    Vector z(L);
    for (int i = 0; i < L; ++i) z(i) = gauss();
    s = psd_sqrt(K) * z;
  }

  const long long burn_in = steps / 10;
  RunningMoments power_acc;       // x^2 over the full run
  RunningMoments innovation_acc;  // nu over the tail
  double lag1_cross = 0.0;
  double prev_innovation = 0.0;
  bool have_prev_innovation = false;
  long long tail_count = 0;
  Vector err_mean = Vector::Zero(L);
  Matrix err_m2 = Matrix::Zero(L, L);

  Matrix K_prev_tail = K;
  for (long long t = 0; t < steps; ++t) {
    const PolicyStage& stage =
        schedule[static_cast<size_t>(std::min<long long>(
            t, static_cast<long long>(schedule.size()) - 1))];
    const KalmanTerms terms = kalman_terms(model, K, stage);

    const double z = gauss();
    const double w = sigma_w * gauss();
    const double x = stage.d.dot(s - m) + stage.e * z;
    const double y = model.a_plus_c.dot(s) + x + w;
    s = model.A * s + model.b * x;

    const double innovation = y - model.a_plus_c.dot(m);
    m = model.A * m + terms.v * (innovation / terms.delta);
    K_prev_tail = K;
    K = cov_update(model, K, stage);

    power_acc.add(x * x);
    if (t >= burn_in) {
      if (have_prev_innovation)
        lag1_cross += prev_innovation * innovation;
      prev_innovation = innovation;
      have_prev_innovation = true;
      innovation_acc.add(innovation);

      ++tail_count;
      const Vector err = s - m;
      const Vector delta = err - err_mean;
      err_mean += delta / static_cast<double>(tail_count);
      err_m2 += delta * (err - err_mean).transpose();
    }
  }

  SimReport report;
  report.steps = steps;
  report.seed = seed;
  report.init =
      (init == SimInit::kStationary) ? "stationary" : "known-state";
  report.empirical_power = power_acc.mean;
  report.empirical_power_stderr = power_acc.stderr_of_mean();

  report.innovation_variance = innovation_acc.variance();
  report.empirical_rate_bits =
      0.5 * std::log2(report.innovation_variance / model.sigma_w2);
  // Delta method: var of the log of a Gaussian sample variance.
  report.empirical_rate_stderr_bits =
      std::sqrt(2.0 / std::max<long long>(innovation_acc.n - 1, 1)) /
      (2.0 * kNatsPerBit);

  const double tail_n = static_cast<double>(innovation_acc.n);
  double centered_sq = innovation_acc.m2;
  if (centered_sq > 0.0 && innovation_acc.n > 2) {
    // lag1_cross accumulated raw products; center with the tail mean.
    const double mu = innovation_acc.mean;
    report.innovation_lag1_autocorr =
        (lag1_cross - (tail_n - 1.0) * mu * mu) / centered_sq;
  }

  report.state_error_cov =
      (tail_count > 1) ? (err_m2 / static_cast<double>(tail_count - 1)).eval()
                       : Matrix::Zero(L, L);
  const double k_norm = K.norm();
  report.k_traj_mismatch =
      (k_norm > 1e-12) ? (report.state_error_cov - K).norm() / k_norm
                       : (report.state_error_cov - K).norm();
  report.k_converged = (K - K_prev_tail).norm() <= 1e-8;
  return report;
}

SimReport simulate(const ChannelModel& model, const PolicyStage& stage,
                   long long steps, std::uint64_t seed, SimInit init) {
  return simulate(model, std::vector<PolicyStage>{stage}, steps, seed, init);
}

}  // namespace fbcap
