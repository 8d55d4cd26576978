#include "gpcp/metrics.hpp"

#include <cmath>

#include "gpcp/errors.hpp"

namespace gpcp {

double empirical_coverage(std::span<const PredictionInterval> intervals, std::span<const double> truths) {
  if (intervals.empty() || intervals.size() != truths.size()) {
    throw DomainError("coverage needs equally sized, non-empty inputs");
  }
  std::size_t inside = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    inside += intervals[i].contains(truths[i]) ? 1 : 0;
  }
  return static_cast<double>(inside) / static_cast<double>(truths.size());
}

double rmse(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.empty() || predictions.size() != truths.size()) {
    throw DomainError("rmse needs equally sized, non-empty inputs");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const double e = predictions[i] - truths[i];
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(truths.size()));
}

double mean_width(std::span<const PredictionInterval> intervals) {
  if (intervals.empty()) {
    throw DomainError("mean width of an empty interval list");
  }
  double sum = 0.0;
  for (const auto& iv : intervals) {
    sum += iv.width();
  }
  return sum / static_cast<double>(intervals.size());
}

std::vector<double> iae_grid(int size) {
  if (size < 2) {
    throw DomainError("IAE grid needs at least two levels");
  }
  std::vector<double> grid(static_cast<std::size_t>(size));
  for (int k = 0; k < size; ++k) {
    grid[static_cast<std::size_t>(k)] = static_cast<double>(k + 1) / static_cast<double>(size + 1);
  }
  return grid;
}

double iae(std::span<const double> grid, std::span<const double> coverages) {
  if (grid.size() < 2 || grid.size() != coverages.size()) {
    throw DomainError("IAE needs at least two levels with one coverage each");
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0 && grid[k] < 1.0) || (k > 0 && !(grid[k] > grid[k - 1]))) {
      throw DomainError("IAE grid must be strictly ascending inside (0, 1)");
    }
  }
  // |delta - alpha| is piecewise linear between grid nodes, but it may change
  // sign inside a panel; integrate each panel exactly for a linear delta.
  const auto panel = [](double a0, double e0, double a1, double e1) {
    const double h = a1 - a0;
    if (e0 * e1 >= 0.0) {
      return 0.5 * h * (std::abs(e0) + std::abs(e1));
    }
    const double t = std::abs(e0) / (std::abs(e0) + std::abs(e1));
    return 0.5 * h * (t * std::abs(e0) + (1.0 - t) * std::abs(e1));
  };
  double total = panel(0.0, 0.0, grid[0], coverages[0] - grid[0]);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    total += panel(grid[k - 1], coverages[k - 1] - grid[k - 1], grid[k], coverages[k] - grid[k]);
  }
  total += panel(grid.back(), coverages.back() - grid.back(), 1.0, 0.0);
  return total;
}

double iae(const std::function<double(double)>& coverage_fn, std::span<const double> grid) {
  std::vector<double> cov(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    cov[k] = coverage_fn(grid[k]);
  }
  return iae(grid, cov);
}

}  // namespace gpcp
