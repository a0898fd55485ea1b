#include "fbcap/channel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fbcap/errors.hpp"

namespace fbcap {

namespace {

constexpr double kZeroSlack = 1e-12;      // hard-reject zeros beyond 1 + this
constexpr double kUnitCircleBand = 1e-9;  // warn for zeros within this of 1
constexpr int kPsdGridSize = 8192;

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

std::vector<double> polynomial_root_radii(const Vector& monic_tail) {
  const int n = static_cast<int>(monic_tail.size());
  if (n == 0) return {};
  // Companion matrix of z^n + p_1 z^{n-1} + ... + p_n.
  Matrix comp = Matrix::Zero(n, n);
  comp.row(0) = -monic_tail.transpose();
  comp.block(1, 0, n - 1, n - 1).setIdentity();
  Eigen::EigenSolver<Matrix> es(comp, /*computeEigenvectors=*/false);
  std::vector<double> radii(n);
  for (int i = 0; i < n; ++i) radii[i] = std::abs(es.eigenvalues()[i]);
  std::sort(radii.begin(), radii.end());
  return radii;
}

ChannelModel build_model(const Vector& a, const Vector& c, double sigma_w2) {
  if (a.size() != c.size())
    throw ConfigError("channel: a and c must have the same length");
  if (!all_finite(a) || !all_finite(c))
    throw ConfigError("channel: non-finite filter coefficient");
  if (!std::isfinite(sigma_w2) || sigma_w2 <= 0.0)
    throw ConfigError("channel: sigma_w2 must be finite and > 0");

  ChannelModel m;
  m.order = static_cast<int>(a.size());
  m.a = a;
  m.c = c;
  m.sigma_w2 = sigma_w2;
  m.a_plus_c = a + c;

  const int L = m.order;
  m.A = Matrix::Zero(L, L);
  m.b = Vector::Zero(L);
  if (L > 0) {
    m.A.row(0) = a.transpose();
    if (L > 1) m.A.block(1, 0, L - 1, L - 1).setIdentity();
    m.b(0) = 1.0;
  }

  // Numerator polynomial is z^L - a_1 z^{L-1} - ... - a_L,
  // denominator is z^L + c_1 z^{L-1} + ... + c_L.
  m.zero_radii = polynomial_root_radii(-a);
  m.pole_radii = polynomial_root_radii(c);

  for (double r : m.pole_radii) {
    if (r >= 1.0) {
      std::ostringstream msg;
      msg << "channel: noise filter pole with modulus " << r
          << " >= 1 (unstable)";
      throw ConfigError(msg.str());
    }
  }
  for (double r : m.zero_radii) {
    if (r > 1.0 + kZeroSlack) {
      std::ostringstream msg;
      msg << "channel: noise filter zero with modulus " << r
          << " > 1 (non-minimum-phase)";
      throw ConfigError(msg.str());
    }
    if (r >= 1.0 - kUnitCircleBand) m.unit_circle_zero_warning = true;
  }
  return m;
}

ChannelModel build_model(const std::vector<double>& a,
                         const std::vector<double>& c, double sigma_w2) {
  Vector av = Eigen::Map<const Vector>(a.data(), static_cast<long>(a.size()));
  Vector cv = Eigen::Map<const Vector>(c.data(), static_cast<long>(c.size()));
  return build_model(av, cv, sigma_w2);
}

double noise_psd(const ChannelModel& model, double omega) {
  // |1 - sum a_l e^{-j l w}|^2 / |1 + sum c_l e^{-j l w}|^2, evaluated as
  // explicit real/imag sums; the denominator cannot vanish because all poles
  // are strictly inside the unit circle.
  double num_re = 1.0, num_im = 0.0, den_re = 1.0, den_im = 0.0;
  for (int l = 1; l <= model.order; ++l) {
    const double cl = std::cos(l * omega);
    const double sl = std::sin(l * omega);
    num_re -= model.a(l - 1) * cl;
    num_im += model.a(l - 1) * sl;
    den_re += model.c(l - 1) * cl;
    den_im -= model.c(l - 1) * sl;
  }
  const double num = num_re * num_re + num_im * num_im;
  const double den = den_re * den_re + den_im * den_im;
  return model.sigma_w2 * num / den;
}

std::vector<double> noise_autocovariance(const ChannelModel& model,
                                         int max_lag) {
  if (max_lag < 0) throw ConfigError("noise_autocovariance: max_lag < 0");
  // R(k) = (1/2pi) int S(w) cos(k w) dw. On a uniform grid over a full
  // period the trapezoid rule collapses to a plain average, and for the
  // smooth rational PSD it converges geometrically in the grid size.
  const int N = kPsdGridSize;
  std::vector<double> psd(N);
  std::vector<double> omegas(N);
  for (int j = 0; j < N; ++j) {
    omegas[j] = -std::numbers::pi + 2.0 * std::numbers::pi * j / N;
    psd[j] = noise_psd(model, omegas[j]);
  }
  std::vector<double> r(max_lag + 1, 0.0);
  for (int k = 0; k <= max_lag; ++k) {
    double acc = 0.0;
    for (int j = 0; j < N; ++j) acc += psd[j] * std::cos(k * omegas[j]);
    r[k] = acc / N;
  }
  return r;
}

std::pair<ChannelState, double> step_channel(const ChannelModel& model,
                                             const ChannelState& s_prev,
                                             double x, double w) {
  if (s_prev.s.size() != model.order)
    throw ConfigError("step_channel: state dimension mismatch");
  ChannelState next;
  next.s = model.A * s_prev.s + model.b * x;
  const double y = model.a_plus_c.dot(s_prev.s) + x + w;
  return {std::move(next), y};
}

}  // namespace fbcap
