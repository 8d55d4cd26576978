#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "gpcp/types.hpp"

namespace gpcp::detail {

struct NelderMeadResult {
  Vector x;
  double value = 0.0;
  int evaluations = 0;
};

/// Derivative-free minimization. Non-finite objective values are treated as
/// +inf, so infeasible regions simply repel the simplex.
inline NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& objective, const Vector& start,
                                    double step, int max_evals, double f_tol, double x_tol) {
  const Index d = start.size();
  const auto eval = [&](const Vector& x, int& count) {
    ++count;
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  int count = 0;
  std::vector<Vector> simplex(static_cast<std::size_t>(d + 1), start);
  std::vector<double> values(static_cast<std::size_t>(d + 1));
  for (Index j = 0; j < d; ++j) {
    simplex[static_cast<std::size_t>(j + 1)](j) += step;
  }
  for (std::size_t k = 0; k < simplex.size(); ++k) {
    values[k] = eval(simplex[k], count);
  }

  std::vector<std::size_t> order(simplex.size());
  while (count < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];

    double size = 0.0;
    for (const auto& v : simplex) {
      size = std::max(size, (v - simplex[best]).cwiseAbs().maxCoeff());
    }
    if (std::isfinite(values[worst]) && values[worst] - values[best] <= f_tol && size <= x_tol) {
      break;
    }

    Vector centroid = Vector::Zero(d);
    for (std::size_t k = 0; k < simplex.size(); ++k) {
      if (k != worst) {
        centroid += simplex[k];
      }
    }
    centroid /= static_cast<double>(d);

    const Vector reflected = centroid + (centroid - simplex[worst]);
    const double f_reflected = eval(reflected, count);
    if (f_reflected < values[best]) {
      const Vector expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double f_expanded = eval(expanded, count);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[worst];
    const Vector contracted = outside ? Vector(centroid + 0.5 * (reflected - centroid))
                                      : Vector(centroid + 0.5 * (simplex[worst] - centroid));
    const double f_contracted = eval(contracted, count);
    if (f_contracted < (outside ? f_reflected : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    for (std::size_t k = 0; k < simplex.size(); ++k) {
      if (k != best) {
        simplex[k] = simplex[best] + 0.5 * (simplex[k] - simplex[best]);
        values[k] = eval(simplex[k], count);
      }
    }
  }

  const auto it = std::min_element(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(std::distance(values.begin(), it));
  return {simplex[idx], *it, count};
}

}  // namespace gpcp::detail
