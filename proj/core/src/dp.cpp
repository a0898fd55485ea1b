#include "fbcap/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fbcap/errors.hpp"
#include "fbcap/nelder_mead.hpp"
#include "fbcap/stationary.hpp"

namespace fbcap {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Scalar value iteration (L = 1)
// ---------------------------------------------------------------------------

struct KGrid {
  std::vector<double> nodes;  // nodes[0] = 0, then log-spaced k_min..k_max
  double log_kmin = 0.0;
  double dlog = 0.0;
  double kmax = 0.0;

  // Piecewise-linear interpolation; the log-uniform spacing makes the
  // bracketing index a closed-form expression.
  double interp(const std::vector<double>& J, double K) const {
    const int m = static_cast<int>(nodes.size()) - 1;
    if (K <= 0.0) return J[0];
    if (K >= nodes[m]) return J[m];
    int i;
    if (K <= nodes[1]) {
      i = 0;
    } else {
      i = 1 + static_cast<int>((std::log(K) - log_kmin) / dlog);
      i = std::clamp(i, 1, m - 1);
      while (i > 1 && K < nodes[i]) --i;
      while (i < m - 1 && K > nodes[i + 1]) ++i;
    }
    const double w = (K - nodes[i]) / (nodes[i + 1] - nodes[i]);
    return (1.0 - w) * J[i] + w * J[i + 1];
  }
};

struct ScalarChannel {
  double a = 0.0;    // single MA tap
  double apc = 0.0;  // a + c
  double s2 = 1.0;   // sigma_w2
};

double scalar_cov_update(const ScalarChannel& ch, double K, double d,
                         double e2) {
  const double phi = ch.apc + d;
  const double delta = phi * phi * K + e2 + ch.s2;
  const double Q = ch.a + d;
  const double v = Q * K * phi + e2;
  const double Kn = Q * Q * K + e2 - v * v / delta;
  return Kn > 0.0 ? Kn : 0.0;
}

struct StageContext {
  ScalarChannel ch;
  double gamma = 0.0;
  const KGrid* grid = nullptr;
  const std::vector<double>* J_prev = nullptr;  // null => terminal stage
};

// Omega(K, d, e) + J_prev(K'). Beyond the top grid node J is extrapolated
// flat; a trajectory that actually lands there is rejected at extraction
// time (GridEscape), not per candidate.
double stage_value(const StageContext& ctx, double K, double d, double e) {
  const double e2 = e * e;
  const double phi = ctx.ch.apc + d;
  const double excess = phi * phi * K + e2;
  const double reward = 0.5 * std::log1p(excess / ctx.ch.s2) -
                        ctx.gamma * (d * d * K + e2);
  if (ctx.J_prev == nullptr) return reward;
  const double Kn = scalar_cov_update(ctx.ch, K, d, e2);
  return reward + ctx.grid->interp(*ctx.J_prev, Kn);
}

struct BestControl {
  double f = kNegInf;
  double d = 0.0;
  double e = 0.0;

  // Near-ties break toward the smaller |d| so channels where d and e are
  // interchangeable settle on the innovation-only source.
  void consider(double f_new, double d_new, double e_new) {
    if (!std::isfinite(f_new)) return;
    const double tol =
        (f == kNegInf) ? 0.0 : 1e-12 * std::max(1.0, std::abs(f));
    if (f == kNegInf || f_new > f + tol ||
        (f_new > f - tol && std::abs(d_new) < std::abs(d))) {
      f = f_new;
      d = d_new;
      e = e_new;
    }
  }
};

struct SearchGeometry {
  double d_lo = 0.0, d_hi = 0.0, e_hi = 0.0;
};

void scan_grid(const StageContext& ctx, double K, const SearchGeometry& geom,
               int nd, int ne, BestControl& best) {
  const double d_step = (geom.d_hi - geom.d_lo) / (nd - 1);
  const double e_step = geom.e_hi / (ne - 1);
  for (int i = 0; i < nd; ++i) {
    const double d = geom.d_lo + i * d_step;
    for (int j = 0; j < ne; ++j) {
      const double e = j * e_step;
      best.consider(stage_value(ctx, K, d, e), d, e);
    }
  }
  // d = 0 participates exactly regardless of grid alignment.
  for (int j = 0; j < ne; ++j)
    best.consider(stage_value(ctx, K, 0.0, j * e_step), 0.0, j * e_step);
}

void refine_and_polish(const StageContext& ctx, double K,
                       const SearchGeometry& geom, const GridConfig& cfg,
                       BestControl& best) {
  double span_d = (geom.d_hi - geom.d_lo) / cfg.thin_d;
  double span_e = geom.e_hi / cfg.thin_e;
  for (int round = 0; round < cfg.refine_rounds; ++round) {
    const BestControl center = best;
    for (int i = -6; i <= 6; ++i) {
      const double d = center.d + i * span_d / 6.0;
      for (int j = -4; j <= 4; ++j) {
        const double e = std::max(0.0, center.e + j * span_e / 4.0);
        best.consider(stage_value(ctx, K, d, e), d, e);
      }
    }
    span_d /= cfg.refine_shrink;
    span_e /= cfg.refine_shrink;
  }
  // Simplex polish: keeps the maximizer continuous in gamma, which the
  // grid-only argmax cannot (its output is quantized to the grid pitch).
  // A second pass with a rescaled simplex recovers the last digits, which
  // the gamma calibration needs to hit its 1e-6 power tolerance.
  auto objective = [&](const Eigen::VectorXd& x) {
    return -stage_value(ctx, K, x(0), std::abs(x(1)));
  };
  double step_d = std::max(span_d, 1e-9);
  double step_e = std::max(span_e, 1e-9);
  for (int pass = 0; pass < 2; ++pass) {
    NelderMeadOptions nm;
    nm.max_evals = cfg.polish_evals;
    nm.f_tol = 1e-15;
    nm.step_vector = Eigen::Vector2d(step_d, step_e);
    const auto polished =
        nelder_mead(objective, Eigen::Vector2d(best.d, best.e), nm);
    best.consider(-polished.f, polished.x(0), std::abs(polished.x(1)));
    step_d = std::max(1e-3 * step_d, 1e-12);
    step_e = std::max(1e-3 * step_e, 1e-12);
  }
}

BestControl optimize_stage(const StageContext& ctx, double K,
                           const SearchGeometry& geom, const GridConfig& cfg,
                           bool full_scan,
                           const std::vector<std::pair<double, double>>& warm) {
  BestControl best;
  if (full_scan) {
    scan_grid(ctx, K, geom, cfg.d_count, cfg.e_count, best);
  } else {
    scan_grid(ctx, K, geom, cfg.thin_d, cfg.thin_e, best);
  }
  for (const auto& [wd, we] : warm)
    best.consider(stage_value(ctx, K, wd, we), wd, we);
  refine_and_polish(ctx, K, geom, cfg, best);
  return best;
}

struct ResolvedVi {
  GridConfig cfg;
  KGrid grid;
  SearchGeometry geom;
  ScalarChannel ch;
};

ResolvedVi resolve_vi(const ChannelModel& model, const ShadowPrice& price,
                      const GridConfig& config) {
  if (model.order != 1)
    throw ConfigError("value_iteration_scalar: channel order must be 1");
  ResolvedVi r;
  r.cfg = config;
  r.ch.a = model.a(0);
  r.ch.apc = model.a_plus_c(0);
  r.ch.s2 = model.sigma_w2;

  const double s2 = model.sigma_w2;
  const double p_ref = (config.power_hint > 0.0)
                           ? config.power_hint
                           : std::max(0.5 / price.gamma, s2);
  if (r.cfg.k_min <= 0.0) r.cfg.k_min = 1e-8 * s2;
  if (r.cfg.k_max <= 0.0) r.cfg.k_max = 10.0 * (p_ref + s2);

  // Search ranges centered on the first-order stationary optimum.
  double d_star = 0.0, e_star = std::sqrt(p_ref);
  if (std::abs(r.ch.a) < 1.0 && std::abs(model.c(0)) < 1.0) {
    const FirstOrderResult fo =
        first_order_rate(r.ch.a, model.c(0), s2, p_ref);
    d_star = fo.d;
    e_star = fo.awgn_branch ? fo.e : std::sqrt(p_ref);
  }
  const double w =
      std::max({3.0 * std::abs(d_star), 3.0 * std::sqrt(p_ref / s2), 2.0});
  r.geom.d_lo = d_star - w;
  r.geom.d_hi = d_star + w;
  r.geom.e_hi = std::max(3.0 * e_star, 2.0 * std::sqrt(p_ref + s2));

  const int m = r.cfg.grid_size;
  if (m < 2) throw ConfigError("value_iteration_scalar: grid_size too small");
  r.grid.nodes.resize(m + 1);
  r.grid.nodes[0] = 0.0;
  r.grid.log_kmin = std::log(r.cfg.k_min);
  r.grid.dlog = (std::log(r.cfg.k_max) - r.grid.log_kmin) / (m - 1);
  for (int i = 0; i < m; ++i)
    r.grid.nodes[static_cast<size_t>(i) + 1] =
        std::exp(r.grid.log_kmin + i * r.grid.dlog);
  r.grid.nodes[m] = r.cfg.k_max;
  r.grid.kmax = r.cfg.k_max;
  return r;
}

int nearest_node(const KGrid& grid, double K) {
  const auto it =
      std::lower_bound(grid.nodes.begin(), grid.nodes.end(), K);
  if (it == grid.nodes.begin()) return 0;
  if (it == grid.nodes.end()) return static_cast<int>(grid.nodes.size()) - 1;
  const int hi = static_cast<int>(it - grid.nodes.begin());
  return (K - grid.nodes[hi - 1] < grid.nodes[hi] - K) ? hi - 1 : hi;
}

}  // namespace

ValueTable value_iteration_scalar(const ChannelModel& model,
                                  const ShadowPrice& price, int n,
                                  const GridConfig& config) {
  if (n < 1) throw ConfigError("value_iteration_scalar: n must be >= 1");
  ResolvedVi r = resolve_vi(model, price, config);
  const int G = static_cast<int>(r.grid.nodes.size());

  ValueTable table;
  table.grid = r.grid.nodes;
  table.gamma = price.gamma;
  table.d_lo = r.geom.d_lo;
  table.d_hi = r.geom.d_hi;
  table.e_hi = r.geom.e_hi;
  table.config = r.cfg;
  table.J = Matrix::Zero(n, G);
  table.argmax_d = Matrix::Zero(n, G);
  table.argmax_e = Matrix::Zero(n, G);

  std::vector<double> J_prev(static_cast<size_t>(G), 0.0);
  for (int k = 1; k <= n; ++k) {
    StageContext ctx;
    ctx.ch = r.ch;
    ctx.gamma = price.gamma;
    ctx.grid = &r.grid;
    ctx.J_prev = (k == 1) ? nullptr : &J_prev;
    for (int g = 0; g < G; ++g) {
      std::vector<std::pair<double, double>> warm;
      if (k > 1)
        warm.emplace_back(table.argmax_d(k - 2, g), table.argmax_e(k - 2, g));
      if (g > 0)
        warm.emplace_back(table.argmax_d(k - 1, g - 1),
                          table.argmax_e(k - 1, g - 1));
      const bool full =
          (k == 1) && (g % std::max(1, r.cfg.full_scan_stride) == 0);
      const BestControl best =
          optimize_stage(ctx, r.grid.nodes[static_cast<size_t>(g)], r.geom,
                         r.cfg, full, warm);
      table.J(k - 1, g) = best.f;
      table.argmax_d(k - 1, g) = best.d;
      table.argmax_e(k - 1, g) = std::abs(best.e);
    }
    for (int g = 0; g < G; ++g) J_prev[static_cast<size_t>(g)] = table.J(k - 1, g);
  }
  return table;
}

NBlockResult value_iteration_nblock(const ChannelModel& model,
                                    const ShadowPrice& price, int n,
                                    const GridConfig& config) {
  const ValueTable table = value_iteration_scalar(model, price, n, config);
  ResolvedVi r = resolve_vi(model, price, table.config);
  const int G = static_cast<int>(r.grid.nodes.size());

  // Walk the deterministic covariance trajectory from K_0 = 0, re-solving
  // the stage maximization at each exact (generally off-grid) covariance.
  std::vector<PolicyStage> stages;
  stages.reserve(static_cast<size_t>(n));
  std::vector<double> J_row(static_cast<size_t>(G));
  double K = 0.0;
  for (int t = 1; t <= n; ++t) {
    const int k = n - t + 1;
    StageContext ctx;
    ctx.ch = r.ch;
    ctx.gamma = price.gamma;
    ctx.grid = &r.grid;
    if (k >= 2) {
      for (int g = 0; g < G; ++g) J_row[static_cast<size_t>(g)] = table.J(k - 2, g);
      ctx.J_prev = &J_row;
    } else {
      ctx.J_prev = nullptr;
    }
    const int node = nearest_node(r.grid, K);
    std::vector<std::pair<double, double>> warm{
        {table.argmax_d(k - 1, node), table.argmax_e(k - 1, node)}};
    const BestControl best =
        optimize_stage(ctx, K, r.geom, r.cfg, /*full_scan=*/false, warm);
    PolicyStage stage;
    stage.d = Vector::Constant(1, best.d);
    stage.e = std::abs(best.e);
    stages.push_back(stage);
    K = scalar_cov_update(r.ch, K, best.d, best.e * best.e);
    if (K > r.grid.kmax) {
      std::ostringstream msg;
      msg << "value_iteration_nblock: trajectory covariance " << K
          << " left the grid (k_max " << r.grid.kmax << ")";
      throw GridEscape(msg.str(), K - r.grid.kmax);
    }
  }
  return rollout(model, stages, price.gamma);
}

// ---------------------------------------------------------------------------
// Rollout
// ---------------------------------------------------------------------------

NBlockResult rollout(const ChannelModel& model,
                     const std::vector<PolicyStage>& stages, double gamma,
                     const Matrix& K0) {
  if (stages.empty()) throw ConfigError("rollout: empty stage schedule");
  const int n = static_cast<int>(stages.size());
  NBlockResult out;
  out.n = n;
  out.gamma = gamma;
  out.stages = stages;
  out.K_traj.reserve(static_cast<size_t>(n) + 1);
  out.K_traj.push_back(K0);
  double rate_sum = 0.0, power_sum = 0.0;
  Matrix K = K0;
  for (const PolicyStage& stage : stages) {
    rate_sum += stage_rate(model, K, stage);
    power_sum += stage_power(model, K, stage);
    K = cov_update(model, K, stage);
    out.K_traj.push_back(K);
  }
  out.power = power_sum / n;
  out.capacity_nats = rate_sum / n;
  out.capacity_bits = nats_to_bits(out.capacity_nats);
  return out;
}

NBlockResult rollout(const ChannelModel& model,
                     const std::vector<PolicyStage>& stages, double gamma) {
  return rollout(model, stages, gamma,
                 Matrix::Zero(model.order, model.order));
}

// ---------------------------------------------------------------------------
// Direct trajectory optimization (any order)
// ---------------------------------------------------------------------------

namespace {

std::vector<PolicyStage> clone_with(const std::vector<PolicyStage>& stages,
                                    int t, const Vector& d, double e) {
  std::vector<PolicyStage> out = stages;
  out[static_cast<size_t>(t)].d = d;
  out[static_cast<size_t>(t)].e = e;
  return out;
}

// Sum of stage rewards for stages [t0, n) starting from covariance K.
double tail_reward(const ChannelModel& model, const ShadowPrice& price,
                   const std::vector<PolicyStage>& stages, Matrix K, int t0) {
  const int n = static_cast<int>(stages.size());
  double total = 0.0;
  for (int t = t0; t < n; ++t) {
    total += reward_omega(model, K, stages[static_cast<size_t>(t)], price);
    if (t + 1 < n) K = cov_update(model, K, stages[static_cast<size_t>(t)]);
  }
  return total;
}

PolicyStage maximize_single_stage(const ChannelModel& model,
                                  const ShadowPrice& price, const Matrix& K,
                                  double e_guess) {
  const int L = model.order;
  auto objective = [&](const Eigen::VectorXd& x) {
    PolicyStage stage{x.head(L).eval(), std::abs(x(L))};
    return -reward_omega(model, K, stage, price);
  };
  NelderMeadOptions nm;
  nm.max_evals = 300;
  nm.f_tol = 1e-13;
  nm.step = 0.4;
  Eigen::VectorXd best_x;
  double best_f = std::numeric_limits<double>::infinity();
  std::vector<Eigen::VectorXd> starts;
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(L + 1);
  x0(L) = e_guess;
  starts.push_back(x0);
  if (L > 0) {
    Eigen::VectorXd x1 = x0;
    x1.head(L) = model.a_plus_c;
    starts.push_back(x1);
  }
  for (const auto& s : starts) {
    const auto res = nelder_mead(objective, s, nm);
    if (res.f < best_f) {
      best_f = res.f;
      best_x = res.x;
    }
  }
  return PolicyStage{best_x.head(L).eval(), std::abs(best_x(L))};
}

}  // namespace

NBlockResult trajectory_optimize(const ChannelModel& model,
                                 const ShadowPrice& price, int n,
                                 const std::vector<PolicyStage>& init) {
  if (n < 1) throw ConfigError("trajectory_optimize: n must be >= 1");
  const int L = model.order;
  if (!init.empty() && static_cast<int>(init.size()) != n)
    throw ConfigError("trajectory_optimize: init schedule length != n");
  for (const auto& s : init)
    if (s.d.size() != L)
      throw ConfigError("trajectory_optimize: init stage dimension mismatch");

  const double e_flat = std::sqrt(
      std::max(0.5 / price.gamma - model.sigma_w2, 0.01 * model.sigma_w2));

  // Greedy (myopic) schedule: each stage maximizes its own reward.
  std::vector<PolicyStage> myopic;
  {
    Matrix K = Matrix::Zero(L, L);
    for (int t = 0; t < n; ++t) {
      PolicyStage stage = maximize_single_stage(model, price, K, e_flat);
      myopic.push_back(stage);
      K = cov_update(model, K, stage);
    }
  }

  std::vector<std::vector<PolicyStage>> starts;
  if (!init.empty()) starts.push_back(init);
  starts.push_back(myopic);
  starts.push_back(
      std::vector<PolicyStage>(static_cast<size_t>(n),
                               PolicyStage{Vector::Zero(L), e_flat}));
  {
    std::mt19937 rng(987654321u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int rep = 0; rep < 2; ++rep) {
      std::vector<PolicyStage> jittered = myopic;
      for (auto& stage : jittered) {
        for (int i = 0; i < L; ++i)
          stage.d(i) += 0.3 * gauss(rng) * (std::abs(stage.d(i)) + 0.5);
        stage.e = std::abs(stage.e + 0.3 * gauss(rng) * (stage.e + 0.5));
      }
      starts.push_back(std::move(jittered));
    }
  }

  constexpr int kMaxSweeps = 200;
  constexpr double kSweepTol = 1e-10;
  std::vector<PolicyStage> best_stages;
  double best_total = kNegInf;
  bool best_stalled = false;

  for (auto stages : starts) {
    std::vector<Matrix> prefix(static_cast<size_t>(n) + 1);
    auto recompute_prefix = [&] {
      prefix[0] = Matrix::Zero(L, L);
      for (int t = 0; t < n; ++t)
        prefix[static_cast<size_t>(t) + 1] =
            cov_update(model, prefix[static_cast<size_t>(t)],
                       stages[static_cast<size_t>(t)]);
    };
    recompute_prefix();
    double total = tail_reward(model, price, stages, prefix[0], 0);
    bool stalled = true;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      for (int t = n - 1; t >= 0; --t) {
        const Matrix& K_in = prefix[static_cast<size_t>(t)];
        auto objective = [&](const Eigen::VectorXd& x) {
          const auto trial =
              clone_with(stages, t, x.head(L).eval(), std::abs(x(L)));
          return -tail_reward(model, price, trial, K_in, t);
        };
        Eigen::VectorXd x0(L + 1);
        x0.head(L) = stages[static_cast<size_t>(t)].d;
        x0(L) = stages[static_cast<size_t>(t)].e;
        NelderMeadOptions nm;
        nm.max_evals = 60 * (L + 1);
        nm.f_tol = 1e-13;
        nm.step = 0.25;
        const auto res = nelder_mead(objective, x0, nm);
        const double current = tail_reward(model, price, stages, K_in, t);
        if (-res.f > current) {
          stages[static_cast<size_t>(t)].d = res.x.head(L);
          stages[static_cast<size_t>(t)].e = std::abs(res.x(L));
        }
      }
      recompute_prefix();
      const double new_total = tail_reward(model, price, stages, prefix[0], 0);
      const double gain = new_total - total;
      total = new_total;
      if (gain < kSweepTol) {
        stalled = false;
        break;
      }
    }
    if (total > best_total) {
      best_total = total;
      best_stages = stages;
      best_stalled = stalled;
    }
  }

  // K_0 = 0 makes the first-stage feedback gain both free and useless;
  // normalize it to zero. Amplitudes that are simplex dust get zeroed too
  // whenever that costs nothing.
  if (L > 0) best_stages.front().d.setZero();
  {
    const Matrix K0 = Matrix::Zero(L, L);
    double total_now = tail_reward(model, price, best_stages, K0, 0);
    for (auto& stage : best_stages) {
      if (stage.e == 0.0 || stage.e * stage.e > 1e-12) continue;
      const double saved = stage.e;
      stage.e = 0.0;
      const double total_zeroed = tail_reward(model, price, best_stages, K0, 0);
      if (total_zeroed >= total_now - 1e-14)
        total_now = total_zeroed;
      else
        stage.e = saved;
    }
  }

  NBlockResult out = rollout(model, best_stages, price.gamma);
  out.optimizer_stalled = best_stalled;
  return out;
}

// ---------------------------------------------------------------------------
// Shadow-price calibration
// ---------------------------------------------------------------------------

std::pair<double, NBlockResult> calibrate_gamma(const ChannelModel& model,
                                                int n, double target_P,
                                                NBlockSolver solver,
                                                const GridConfig& config) {
  if (!std::isfinite(target_P) || target_P <= 0.0)
    throw ConfigError("calibrate_gamma: target_P must be finite and > 0");
  constexpr double kGammaLo = 1e-6;
  constexpr double kGammaHi = 1e3;
  constexpr double kRelTol = 1e-6;
  constexpr int kMaxRuns = 200;

  GridConfig cfg = config;
  if (cfg.power_hint <= 0.0) cfg.power_hint = target_P;

  int runs = 0;
  NBlockResult warm;  // previous trajectory solution, reused as init
  auto solve_at = [&](double gamma) {
    ++runs;
    const ShadowPrice price(gamma);
    if (solver == NBlockSolver::kValueIteration)
      return value_iteration_nblock(model, price, n, cfg);
    NBlockResult res = trajectory_optimize(
        model, price, n, warm.stages.empty() ? std::vector<PolicyStage>{}
                                             : warm.stages);
    warm = res;
    return res;
  };

  double best_gamma = 0.0;
  double best_err = std::numeric_limits<double>::infinity();
  NBlockResult best_result;
  auto record = [&](double gamma, const NBlockResult& res) {
    const double err = std::abs(res.power - target_P) / target_P;
    if (err < best_err) {
      best_err = err;
      best_gamma = gamma;
      best_result = res;
    }
    return err <= kRelTol;
  };

  // Expand a bracket [lo, hi] with power(lo) >= target >= power(hi) around
  // the white-noise closed-form guess.
  double gamma0 = std::clamp(0.5 / (target_P + model.sigma_w2), kGammaLo,
                             kGammaHi);
  double lo = gamma0, hi = gamma0;
  NBlockResult res0 = solve_at(gamma0);
  if (record(gamma0, res0)) return {best_gamma, best_result};
  double p_lo = res0.power, p_hi = res0.power;
  while (p_lo < target_P) {
    if (lo <= kGammaLo) {
      std::ostringstream msg;
      msg << "calibrate_gamma: power " << p_lo << " at gamma " << kGammaLo
          << " cannot reach target " << target_P;
      throw BracketFailure(msg.str(), target_P - p_lo);
    }
    lo = std::max(lo * 0.5, kGammaLo);
    const NBlockResult res = solve_at(lo);
    if (record(lo, res)) return {best_gamma, best_result};
    p_lo = res.power;
  }
  while (p_hi > target_P) {
    if (hi >= kGammaHi)
      throw BracketFailure(
          "calibrate_gamma: target power below reach of gamma = 1e3",
          p_hi - target_P);
    hi = std::min(hi * 2.0, kGammaHi);
    const NBlockResult res = solve_at(hi);
    if (record(hi, res)) return {best_gamma, best_result};
    p_hi = res.power;
  }

  while (runs < kMaxRuns) {
    if (hi - lo <= 1e-10 * std::max(1.0, hi)) break;  // solver noise floor
    const double mid = 0.5 * (lo + hi);
    const NBlockResult res = solve_at(mid);
    if (record(mid, res)) return {best_gamma, best_result};
    if (res.power >= target_P)
      lo = mid;
    else
      hi = mid;
  }
  return {best_gamma, best_result};
}

}  // namespace fbcap
