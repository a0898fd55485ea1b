#ifndef FBCAP_CHANNEL_HPP
#define FBCAP_CHANNEL_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace fbcap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Additive Gaussian noise channel whose noise is white noise passed through
/// the rational filter H(z) = (1 - sum a_l z^-l) / (1 + sum c_l z^-l).
///
/// In state-space form the channel keeps an L-entry shift register s:
///   s_t = A s_{t-1} + b x_t
///   y_t = (a+c)^T s_{t-1} + x_t + w_t,   w_t ~ N(0, sigma_w2)
/// where A is the companion matrix of the a-coefficients and b = e_1.
///
/// L = 0 is the plain AWGN channel (empty a, c; the state is empty).
struct ChannelModel {
  int order = 0;       // L
  Vector a;            // MA taps, length L
  Vector c;            // AR taps, length L
  double sigma_w2 = 1; // innovation variance of the driving white noise
  Matrix A;            // L x L companion matrix, first row = a
  Vector b;            // L-vector [1, 0, ..., 0]
  Vector a_plus_c;     // cached a + c
  std::vector<double> zero_radii; // moduli of numerator roots
  std::vector<double> pole_radii; // moduli of denominator roots
  // Set when a numerator root sits on (or within 1e-9 of) the unit circle.
  // Such models are accepted but the PSD touches zero, so downstream
  // quadrature is at its accuracy limit.
  bool unit_circle_zero_warning = false;
};

/// Shift-register contents; entries must stay finite.
struct ChannelState {
  Vector s;
};

/// Validates coefficients, builds the companion form, and computes the root
/// radii of both filter polynomials.
///
/// Rejects: mismatched lengths, non-finite taps, sigma_w2 <= 0, any pole
/// with modulus >= 1, any zero with modulus > 1 + 1e-12. Zeros on the unit
/// circle (within 1e-9) only set `unit_circle_zero_warning`. Trailing zero
/// taps are kept as-is; the corresponding roots land at the origin, which is
/// treated as an order reduction rather than an error.
ChannelModel build_model(const Vector& a, const Vector& c, double sigma_w2);

/// Convenience overload for initializer-list style call sites.
ChannelModel build_model(const std::vector<double>& a,
                         const std::vector<double>& c, double sigma_w2);

/// Noise power spectral density sigma_w2 * |H(e^{j omega})|^2. Even in omega
/// and strictly positive except at unit-circle zeros.
double noise_psd(const ChannelModel& model, double omega);

/// Autocovariance R(0..max_lag) of the stationary noise process, computed by
/// trapezoidal quadrature of the PSD on a uniform 8192-point grid. One code
/// path for every order; closed forms are used as oracles in the tests.
std::vector<double> noise_autocovariance(const ChannelModel& model,
                                         int max_lag);

/// One step of the state-space channel: returns the next state and output.
std::pair<ChannelState, double> step_channel(const ChannelModel& model,
                                             const ChannelState& s_prev,
                                             double x, double w);

/// Moduli of the roots of z^L + p_1 z^{L-1} + ... + p_L (computed from the
/// companion matrix). Exposed for tests.
std::vector<double> polynomial_root_radii(const Vector& monic_tail);

}  // namespace fbcap

#endif  // FBCAP_CHANNEL_HPP
