#include "fbcap/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace fbcap {

NelderMeadResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& x0, const NelderMeadOptions& options) {
  using Eigen::VectorXd;
  const int n = static_cast<int>(x0.size());
  NelderMeadResult result;
  result.x = x0;
  if (n == 0) {
    result.f = objective(x0);
    result.evals = 1;
    result.converged = true;
    return result;
  }

  int evals = 0;
  auto eval = [&](const VectorXd& x) {
    ++evals;
    const double f = objective(x);
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  };

  std::vector<VectorXd> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (int i = 0; i < n; ++i) {
    const double h = (options.step_vector.size() == n)
                         ? options.step_vector(i)
                         : options.step * std::max(1.0, std::abs(x0(i)));
    xs[i + 1](i) += (h != 0.0) ? h : options.step;
  }
  for (int i = 0; i <= n; ++i) fs[i] = eval(xs[i]);

  std::vector<int> order(n + 1);
  std::iota(order.begin(), order.end(), 0);
  auto sort_simplex = [&] {
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return fs[i] < fs[j]; });
  };

  while (evals < options.max_evals) {
    sort_simplex();
    const int best = order[0], worst = order[n], second_worst = order[n - 1];
    if (std::isfinite(fs[worst]) &&
        fs[worst] - fs[best] <= options.f_tol) {
      result.converged = true;
      break;
    }

    VectorXd centroid = VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += xs[i];
    centroid /= n;

    const VectorXd reflected = centroid + (centroid - xs[worst]);
    const double f_reflected = eval(reflected);

    if (f_reflected < fs[best]) {
      const VectorXd expanded = centroid + 2.0 * (centroid - xs[worst]);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        xs[worst] = expanded;
        fs[worst] = f_expanded;
      } else {
        xs[worst] = reflected;
        fs[worst] = f_reflected;
      }
    } else if (f_reflected < fs[second_worst]) {
      xs[worst] = reflected;
      fs[worst] = f_reflected;
    } else {
      const bool outside = f_reflected < fs[worst];
      const VectorXd contracted =
          outside ? (centroid + 0.5 * (reflected - centroid)).eval()
                  : (centroid + 0.5 * (xs[worst] - centroid)).eval();
      const double f_contracted = eval(contracted);
      if (f_contracted < std::min(f_reflected, fs[worst])) {
        xs[worst] = contracted;
        fs[worst] = f_contracted;
      } else {
        for (int i = 1; i <= n; ++i) {
          const int idx = order[i];
          xs[idx] = xs[order[0]] + 0.5 * (xs[idx] - xs[order[0]]);
          fs[idx] = eval(xs[idx]);
        }
      }
    }
  }

  sort_simplex();
  result.x = xs[order[0]];
  result.f = fs[order[0]];
  result.evals = evals;
  return result;
}

}  // namespace fbcap
