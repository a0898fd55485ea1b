#ifndef FBCAP_WATERFILL_HPP
#define FBCAP_WATERFILL_HPP

#include <vector>

#include "fbcap/channel.hpp"

namespace fbcap {

/// Feed-forward n-block capacity by water-filling over the eigenvalues of
/// the n x n Toeplitz noise covariance:
///   C = (1/2n) sum_{i<=k} log2((nP + r_1 + ... + r_k) / (k r_i)),
/// with k the largest integer with nP + r_1 + ... + r_k > k r_k
/// (eigenvalues sorted ascending).
struct WaterfillResult {
  int n = 0;
  std::vector<double> eigenvalues;  // sorted ascending
  int k = 0;                        // number of active modes
  double capacity_bits = 0.0;
};

/// Symmetric Toeplitz covariance with first row [R(0) ... R(n-1)].
Matrix noise_cov_matrix(const ChannelModel& model, int n);

/// Water-filling over given eigenvalues (order irrelevant; all must be
/// positive). The strict inequality in the active-mode condition is applied
/// with a 1e-12 relative guard so exact-tie inputs resolve the same way in
/// floating point as on paper.
WaterfillResult waterfill_capacity(std::vector<double> eigenvalues, double P);

/// noise_cov_matrix -> symmetric eigenvalues -> waterfill_capacity. Tiny
/// eigenvalues are floored at 1e-8 * R(0) to absorb quadrature roundoff for
/// spectra that touch zero.
WaterfillResult feedforward_capacity(const ChannelModel& model, int n,
                                     double P);

}  // namespace fbcap

#endif  // FBCAP_WATERFILL_HPP
