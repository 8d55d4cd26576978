#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gpcp/interval.hpp"

namespace gpcp {

struct MetricsRecord {
  double coverage = 0.0;
  double mean_width = 0.0;
  double iae = 0.0;
  double rmse = 0.0;
  double level = 0.0;
  std::string method;
  std::uint64_t seed = 0;
};

/// Fraction of truths inside their (closed) interval.
[[nodiscard]] double empirical_coverage(std::span<const PredictionInterval> intervals, std::span<const double> truths);

[[nodiscard]] double rmse(std::span<const double> predictions, std::span<const double> truths);

[[nodiscard]] double mean_width(std::span<const PredictionInterval> intervals);

/// Equispaced levels {1/(size+1), ..., size/(size+1)}; 99 gives 0.01..0.99.
[[nodiscard]] std::vector<double> iae_grid(int size = 99);

/// Integral over [0, 1] of |coverage(alpha) - alpha|, with the coverage
/// interpolated linearly between the grid levels and pinned to (0, 0) and
/// (1, 1) at the ends. Sign changes inside a panel are integrated exactly.
[[nodiscard]] double iae(std::span<const double> grid, std::span<const double> coverages);
[[nodiscard]] double iae(const std::function<double(double)>& coverage_fn, std::span<const double> grid);

}  // namespace gpcp
