#ifndef FBCAP_DP_HPP
#define FBCAP_DP_HPP

#include <utility>
#include <vector>

#include "fbcap/kalman.hpp"
#include "fbcap/rate.hpp"

namespace fbcap {

/// Quantization of the scalar value iteration. Zeros mean "derive from the
/// model, the shadow price and power_hint": the covariance grid covers
/// [1e-8 sigma_w2, 10 (p_ref + sigma_w2)] with p_ref = max(power_hint,
/// 1/(2 gamma) scale), and the control search ranges are centered on the
/// first-order stationary optimum.
struct GridConfig {
  int grid_size = 400;   // log-spaced covariance nodes; a K = 0 node is added
  double k_min = 0.0;
  double k_max = 0.0;
  double power_hint = 0.0;
  int d_count = 200;     // full coarse (d, e) scan
  int e_count = 100;
  int thin_d = 33;       // global guard scan used at warm-started nodes
  int thin_e = 17;
  int full_scan_stride = 16;  // full scan every this many nodes in stage 1
  int refine_rounds = 2;
  double refine_shrink = 10.0;
  int polish_evals = 160;     // simplex polish after grid refinement
};

/// Reward-to-go tables of the deterministic value iteration for L = 1.
/// Row k-1 holds the k-stage reward-to-go J^(k) on `grid`, together with the
/// maximizing controls per node. Immutable once built.
struct ValueTable {
  std::vector<double> grid;  // ascending, grid[0] = 0
  Matrix J;                  // n_stages x grid_size
  Matrix argmax_d;
  Matrix argmax_e;
  double gamma = 0.0;
  // Resolved search geometry, kept so policy extraction reuses it.
  double d_lo = 0.0, d_hi = 0.0, e_hi = 0.0;
  GridConfig config;
};

/// An optimized n-block source: per-stage controls, the deterministic
/// covariance trajectory from K_0 = 0, and the resulting per-use power and
/// capacity (the capacity depends on the K-trajectory only, never on the
/// realization of the outputs).
struct NBlockResult {
  int n = 0;
  double gamma = 0.0;
  std::vector<PolicyStage> stages;
  std::vector<Matrix> K_traj;  // n + 1 entries
  double power = 0.0;
  double capacity_nats = 0.0;
  double capacity_bits = 0.0;
  bool optimizer_stalled = false;  // trajectory optimizer hit its sweep cap
};

enum class NBlockSolver { kValueIteration, kTrajectory };

/// Deterministic value iteration over a scalar covariance grid (L = 1 only):
/// J^(k)(K) = max_{d,e} { Omega(K, d, e, gamma) + J^(k-1)(K') } with K' the
/// covariance update and J^(k-1) linearly interpolated between nodes. The
/// per-node maximization is a coarse scan, two rounds of 10x local grid
/// refinement, then a simplex polish so the optimum varies continuously in
/// gamma (a bare grid argmax would quantize the power curve and stall the
/// gamma calibration).
ValueTable value_iteration_scalar(const ChannelModel& model,
                                  const ShadowPrice& price, int n,
                                  const GridConfig& config = {});

/// Runs value_iteration_scalar, then extracts the policy along the actual
/// covariance trajectory from K_0 = 0 (re-solving each stage maximization at
/// the exact off-grid covariance) and rolls it out. Throws GridEscape when
/// that trajectory leaves the covariance grid, which signals k_max was
/// configured too small for the channel and shadow price.
NBlockResult value_iteration_nblock(const ChannelModel& model,
                                    const ShadowPrice& price, int n,
                                    const GridConfig& config = {});

/// Direct maximization of sum_t Omega(K_{t-1}, d_t, e_t, gamma) over all
/// n (L+1) stage controls with the covariance chained through cov_update.
/// Multi-start coordinate descent: backward stage sweeps, each stage move a
/// simplex step on the tail objective, until a sweep improves the objective
/// by less than 1e-10. The landscape is nonconvex, so this is a heuristic;
/// hitting the sweep cap sets optimizer_stalled on the result. Works for any
/// order, including L = 0.
NBlockResult trajectory_optimize(const ChannelModel& model,
                                 const ShadowPrice& price, int n,
                                 const std::vector<PolicyStage>& init = {});

/// Chains cov_update from K_0 (zero when omitted), accumulating per-use
/// power and rate for the given stage schedule.
NBlockResult rollout(const ChannelModel& model,
                     const std::vector<PolicyStage>& stages, double gamma);
NBlockResult rollout(const ChannelModel& model,
                     const std::vector<PolicyStage>& stages, double gamma,
                     const Matrix& K0);

/// Finds the shadow price whose optimized n-block source consumes target_P,
/// using bracket expansion around the white-noise guess 1/(2(P + sigma_w2))
/// followed by bisection; the map gamma -> power is monotone nonincreasing.
/// Terminates at |power - target_P| / target_P <= 1e-6 or 200 solver runs,
/// returning the best pair seen. Throws BracketFailure when even
/// gamma = 1e-6 cannot reach target_P.
std::pair<double, NBlockResult> calibrate_gamma(const ChannelModel& model,
                                                int n, double target_P,
                                                NBlockSolver solver,
                                                const GridConfig& config = {});

}  // namespace fbcap

#endif  // FBCAP_DP_HPP
