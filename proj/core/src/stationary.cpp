#include "fbcap/stationary.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include "fbcap/errors.hpp"
#include "fbcap/nelder_mead.hpp"
#include "fbcap/rate.hpp"

namespace fbcap {

namespace {

constexpr double kInnerTol = 1e-11;
constexpr int kInnerMaxIter = 400;
constexpr int kStrictRiccatiIter = 200000;

// Fixed-point iteration from an arbitrary seed. With early_exit set, gives
// up as soon as the residual stops shrinking fast (the exploration phase of
// the outer search probes many hopeless policies; spending the full budget
// there is wasted work). Strict callers keep the full budget.
std::optional<Matrix> riccati_seeded(const ChannelModel& model,
                                     const PolicyStage& stage, Matrix K,
                                     double tol, int max_iter,
                                     bool early_exit) {
  double checkpoint = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    Matrix next = cov_update(model, K, stage);
    const double residual = (K - next).norm();
    K = std::move(next);
    if (residual <= tol * std::max(1.0, K.norm())) return K;
    if (early_exit && (it & 1023) == 1023) {
      if (it >= 4000 && residual > 0.5 * checkpoint) return std::nullopt;
      checkpoint = residual;
    }
  }
  return std::nullopt;
}

struct InnerPoint {
  bool feasible = false;
  Vector d;
  double e = 0.0;
  Matrix K;
  double rate_nats = -std::numeric_limits<double>::infinity();
};

// Seeds carried between evaluations of one simplex run; successive probes
// are close together, so the previous covariance and scale are good starts.
struct InnerScratch {
  bool valid = false;
  Matrix K;
  double s = 1.0;
};

// Feasible point for a fixed direction u (unit) and power split rho:
// e^2 = (1-rho) P, and |d| scaled along u until d^T K d = rho P with K the
// steady state for (d, e). The two conditions are coupled, so they are
// alternated; geometric damping kicks in if the alternation ping-pongs.
// In strict mode the final covariance is recomputed from the canonical seed
// with the full iteration budget.
InnerPoint solve_inner(const ChannelModel& model, const Vector& u, double rho,
                       double P, const Matrix& K_ref, InnerScratch* scratch,
                       bool strict) {
  InnerPoint out;
  const int L = model.order;
  const double e = std::sqrt(std::max(0.0, (1.0 - rho)) * P);
  out.e = e;
  const int explore_iter = strict ? kStrictRiccatiIter : 30000;
  const double tol = strict ? 1e-13 : 1e-12;

  auto finish = [&](const Vector& d) -> bool {
    PolicyStage stage{d, e};
    if (strict) {
      try {
        out.K = riccati_fixed_point(model, stage, 1e-13, kStrictRiccatiIter);
      } catch (const NonConvergent&) {
        return false;
      }
    } else {
      auto K = riccati_seeded(model, stage,
                              scratch && scratch->valid ? scratch->K : K_ref,
                              tol, explore_iter, /*early_exit=*/true);
      if (!K) return false;
      out.K = std::move(*K);
    }
    out.d = d;
    out.rate_nats = stage_rate(model, out.K, stage);
    out.feasible = true;
    if (scratch) {
      scratch->K = out.K;
      scratch->valid = true;
    }
    return true;
  };

  if (rho <= 0.0) {
    finish(Vector::Zero(L));
    return out;
  }

  const double target = rho * P;
  Matrix K = (scratch && scratch->valid) ? scratch->K : K_ref;
  double s = (scratch && scratch->valid) ? scratch->s : 1.0;
  if (!(scratch && scratch->valid)) {
    const double q_ref = u.dot(K_ref * u);
    if (q_ref > 1e-14) s = std::sqrt(target / q_ref);
  }

  for (int it = 0; it < kInnerMaxIter; ++it) {
    PolicyStage stage{(s * u).eval(), e};
    auto next = riccati_seeded(model, stage, K, tol, explore_iter,
                               /*early_exit=*/!strict);
    if (!next) return out;
    K = std::move(*next);
    const double q = u.dot(K * u);
    if (!(q > 1e-13 * std::max(1.0, target)))
      return out;  // no information flows along u at steady state
    const double s_next = std::sqrt(target / q);
    if (!std::isfinite(s_next) || s_next > 1e9) return out;
    if (std::abs(s_next - s) <= kInnerTol * std::max(1.0, std::abs(s))) {
      if (scratch) {
        scratch->K = K;
        scratch->s = s_next;
        scratch->valid = true;
      }
      finish((s_next * u).eval());
      return out;
    }
    // Geometric-mean damping: the raw rescale map oscillates with growing
    // amplitude at low SNR (its slope at the fixed point drops below -1),
    // while the damped map stays contractive there.
    s = std::sqrt(s * s_next);
  }
  return out;
}

// theta = (v in R^L, tau): direction u = v/|v|, split rho = clamp(tau, 0, 1).
InnerPoint eval_theta(const ChannelModel& model, const Vector& theta, double P,
                      const Matrix& K_ref, InnerScratch* scratch,
                      bool strict) {
  const int L = model.order;
  const Vector v = theta.head(L);
  const double rho = std::clamp(theta(L), 0.0, 1.0);
  const double vnorm = v.norm();
  if (rho > 0.0 && vnorm < 1e-12) return {};
  const Vector u = (vnorm < 1e-12) ? Vector::Unit(L, 0) : (v / vnorm).eval();
  return solve_inner(model, u, rho, P, K_ref, scratch, strict);
}

StationaryResult awgn_result(const ChannelModel& model, double P) {
  StationaryResult r;
  r.d = Vector::Zero(model.order);
  r.e = std::sqrt(P);
  PolicyStage stage{r.d, r.e};
  r.K = (model.order > 0)
            ? riccati_fixed_point(model, stage, 1e-13, kStrictRiccatiIter)
            : Matrix(0, 0);
  r.P = P;
  r.I_max_nats = stage_rate(model, r.K, stage);
  r.I_max_bits = nats_to_bits(r.I_max_nats);
  r.riccati_residual = riccati_residual(model, r.K, stage);
  r.power_residual = stage_power(model, r.K, stage) - P;
  return r;
}

}  // namespace

double first_order_quartic(double a, double c, double sigma_w2, double P,
                           double eta) {
  const double snr = P / sigma_w2;
  const double ac = a + c;
  return ((((snr * eta + 2.0 * snr) * eta + (snr + 1.0 - a * a)) * eta -
           2.0 * a * ac) *
              eta -
          ac * ac);
}

FirstOrderResult first_order_rate(double a, double c, double sigma_w2,
                                  double P) {
  if (!(std::abs(a) < 1.0) || !(std::abs(c) < 1.0))
    throw ConfigError("first_order_rate: need -1 < a < 1 and -1 < c < 1");
  if (!std::isfinite(P) || P <= 0.0)
    throw ConfigError("first_order_rate: P must be finite and > 0");
  if (!std::isfinite(sigma_w2) || sigma_w2 <= 0.0)
    throw ConfigError("first_order_rate: sigma_w2 must be finite and > 0");

  FirstOrderResult r;
  const double ac = a + c;
  if (ac == 0.0) {
    // Zero and pole cancel; the channel is white. All power goes through
    // the innovation term.
    r.awgn_branch = true;
    r.eta = 0.0;
    r.d = 0.0;
    r.e = std::sqrt(P);
    r.K = P * sigma_w2 / ((1.0 - a * a) * (P + sigma_w2));
    r.I_max_bits = 0.5 * std::log2(1.0 + P / sigma_w2);
    r.quartic_residual = 0.0;
    return r;
  }

  const double snr = P / sigma_w2;
  // Monic coefficients of the quartic in eta (leading coefficient snr > 0).
  const double p3 = 2.0;
  const double p2 = (snr + 1.0 - a * a) / snr;
  const double p1 = -2.0 * a * ac / snr;
  const double p0 = -ac * ac / snr;
  Matrix comp = Matrix::Zero(4, 4);
  comp(0, 0) = -p3;
  comp(0, 1) = -p2;
  comp(0, 2) = -p1;
  comp(0, 3) = -p0;
  comp.block(1, 0, 3, 3).setIdentity();
  Eigen::EigenSolver<Matrix> es(comp, /*computeEigenvectors=*/false);

  double eta = -1.0;
  for (int i = 0; i < 4; ++i) {
    const auto root = es.eigenvalues()[i];
    if (std::abs(root.imag()) > 1e-9) continue;
    if (root.real() > eta) eta = root.real();
  }
  if (!(eta > 0.0)) {
    std::ostringstream msg;
    msg << "first_order_rate: no positive real quartic root (a=" << a
        << ", c=" << c << "); this should be impossible";
    throw SolverError(msg.str(), std::abs(eta));
  }
  // Two Newton polishes; the companion eigenvalue is already close.
  for (int it = 0; it < 2; ++it) {
    const double f = first_order_quartic(a, c, sigma_w2, P, eta);
    const double df = ((4.0 * snr * eta + 6.0 * snr) * eta +
                       2.0 * (snr + 1.0 - a * a)) *
                          eta -
                      2.0 * a * ac;
    if (df != 0.0) eta -= f / df;
  }

  r.eta = eta;
  r.d = ac / eta;
  r.K = P / (r.d * r.d);
  r.e = 0.0;
  r.I_max_bits =
      0.5 * std::log2(1.0 + (1.0 + eta) * (1.0 + eta) * P / sigma_w2);
  r.quartic_residual = std::abs(first_order_quartic(a, c, sigma_w2, P, eta));
  return r;
}

ButmanResult butman_ar1_rate(double c, double sigma_w2, double P) {
  if (c == 0.0)
    throw ConfigError("butman_ar1_rate: c must be nonzero (AWGN otherwise)");
  if (!(std::abs(c) < 1.0))
    throw ConfigError("butman_ar1_rate: need |c| < 1");
  if (!std::isfinite(P) || P <= 0.0)
    throw ConfigError("butman_ar1_rate: P must be finite and > 0");
  if (!std::isfinite(sigma_w2) || sigma_w2 <= 0.0)
    throw ConfigError("butman_ar1_rate: sigma_w2 must be finite and > 0");

  const double snr = P / sigma_w2;
  const double cc = std::abs(c);
  auto f = [&](double chi) {
    const double g = (chi + cc) / chi;
    return chi * chi - 1.0 - snr * g * g;
  };
  double lo = 1.0;
  double hi = 1.0 + std::sqrt(snr) * (2.0 + cc);  // f(hi) > 0 always
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  ButmanResult r;
  r.chi = 0.5 * (lo + hi);
  r.I_max_bits = std::log2(r.chi);
  return r;
}

StationaryResult solve_stationary(const ChannelModel& model, double P) {
  if (!std::isfinite(P) || P <= 0.0)
    throw ConfigError("solve_stationary: P must be finite and > 0");
  const int L = model.order;
  if (L == 0) return awgn_result(model, P);

  // Reference covariance for scale guesses: full power in the innovation.
  Matrix K_ref;
  {
    PolicyStage probe{Vector::Zero(L), std::sqrt(P)};
    K_ref = riccati_fixed_point(model, probe, 1e-12, kStrictRiccatiIter);
  }

  const Vector ac = model.a_plus_c;
  const Vector dir =
      (ac.norm() > 1e-12) ? (ac / ac.norm()).eval() : Vector::Unit(L, 0);

  std::vector<Vector> starts;
  auto push_start = [&](const Vector& v, double tau) {
    Vector theta(L + 1);
    theta.head(L) = v;
    theta(L) = tau;
    starts.push_back(theta);
  };
  push_start(dir, 1.0);
  push_start(dir, 0.999);
  push_start(dir, 0.99);
  push_start(dir, 0.9);
  push_start(dir, 0.5);
  push_start(Vector::Unit(L, 0), 0.0);  // no-feedback anchor, always feasible
  push_start(-dir, 0.9);
  std::mt19937 rng(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int k = 0; k < 4; ++k) {
    Vector v(L);
    for (int i = 0; i < L; ++i) v(i) = gauss(rng);
    if (v.norm() < 1e-9) v = Vector::Unit(L, 0);
    push_start(v / v.norm(), unif(rng));
  }

  std::optional<Vector> best_theta;
  double best_rate = -std::numeric_limits<double>::infinity();
  double best_rho = 0.0;
  auto run_simplex = [&](const Vector& theta0, const NelderMeadOptions& nm) {
    InnerScratch scratch;
    auto objective = [&](const Vector& theta) {
      const InnerPoint p =
          eval_theta(model, theta, P, K_ref, &scratch, /*strict=*/false);
      return p.feasible ? -p.rate_nats
                        : std::numeric_limits<double>::infinity();
    };
    const NelderMeadResult res = nelder_mead(objective, theta0, nm);
    if (!std::isfinite(res.f)) return;
    const double rate = -res.f;
    const double rho = std::clamp(res.x(L), 0.0, 1.0);
    // Near-ties break toward the smaller feedback share so degenerate
    // channels (white noise) settle on the plain d = 0 source.
    const bool better =
        rate > best_rate + 1e-9 ||
        (rate > best_rate - 1e-9 && rho < best_rho - 1e-12);
    if (better) {
      best_rate = rate;
      best_rho = rho;
      best_theta = res.x;
    }
  };
  // Exploration pass over every start, then a tight polish from the winner.
  NelderMeadOptions explore;
  explore.max_evals = std::min(2000, 250 * (L + 1));
  explore.f_tol = 1e-11;
  explore.step = 0.25;
  for (const Vector& theta0 : starts) run_simplex(theta0, explore);
  if (!best_theta)
    throw Infeasible("solve_stationary: no feasible stationary point found",
                     std::numeric_limits<double>::quiet_NaN());
  NelderMeadOptions polish;
  polish.max_evals = 2000;
  polish.f_tol = 1e-13;
  polish.step = 0.02;
  run_simplex(*best_theta, polish);

  // Final evaluation at full rigor, seeded with the exploration state so the
  // alternation starts at (not merely near) its fixed point.
  InnerScratch warm;
  eval_theta(model, *best_theta, P, K_ref, &warm, /*strict=*/false);
  InnerPoint best =
      eval_theta(model, *best_theta, P, K_ref, &warm, /*strict=*/true);
  // Snap a vanishing innovation amplitude to exactly zero when that loses
  // nothing; the pure-feedback optimum has e = 0 exactly.
  if (best.feasible && best.e > 0.0 && best.e * best.e < 1e-8 * P) {
    Vector snapped = *best_theta;
    snapped(L) = 1.0;
    InnerScratch snap_warm = warm;
    const InnerPoint zero_e =
        eval_theta(model, snapped, P, K_ref, &snap_warm, /*strict=*/true);
    if (zero_e.feasible && zero_e.rate_nats >= best.rate_nats - 1e-10)
      best = zero_e;
  }
  // Degenerate channels leave the rate flat across power splits; resolve the
  // tie to the plain innovation-only source.
  {
    Vector plain(L + 1);
    plain.head(L) = Vector::Unit(L, 0);
    plain(L) = 0.0;
    const InnerPoint no_feedback =
        eval_theta(model, plain, P, K_ref, nullptr, /*strict=*/true);
    if (no_feedback.feasible &&
        (!best.feasible ||
         no_feedback.rate_nats >= best.rate_nats - 1e-9))
      best = no_feedback;
  }
  if (!best.feasible)
    throw Infeasible("solve_stationary: best point lost feasibility",
                     std::numeric_limits<double>::quiet_NaN());

  StationaryResult out;
  out.d = best.d;
  out.e = best.e;
  out.K = best.K;
  out.P = P;
  PolicyStage stage{out.d, out.e};
  out.I_max_nats = stage_rate(model, out.K, stage);
  out.I_max_bits = nats_to_bits(out.I_max_nats);
  out.riccati_residual = riccati_residual(model, out.K, stage);
  out.power_residual = stage_power(model, out.K, stage) - P;
  return out;
}

}  // namespace fbcap
