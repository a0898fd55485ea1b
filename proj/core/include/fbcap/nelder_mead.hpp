#ifndef FBCAP_NELDER_MEAD_HPP
#define FBCAP_NELDER_MEAD_HPP

#include <Eigen/Dense>
#include <functional>

namespace fbcap {

struct NelderMeadOptions {
  int max_evals = 2000;
  // Stop once the simplex function-value spread falls below f_tol.
  double f_tol = 1e-12;
  // Initial simplex offset per coordinate: step * max(1, |x0_i|) unless an
  // explicit step vector is given.
  double step = 0.25;
  Eigen::VectorXd step_vector;  // optional, overrides `step` when nonempty
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int evals = 0;
  bool converged = false;
};

/// Downhill-simplex minimizer (reflection/expansion/contraction/shrink with
/// the classic 1, 2, 1/2, 1/2 coefficients). Deterministic for a fixed
/// starting point; no derivatives, no constraints. Objectives signal an
/// infeasible point by returning +infinity.
NelderMeadResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& x0, const NelderMeadOptions& options = {});

}  // namespace fbcap

#endif  // FBCAP_NELDER_MEAD_HPP
