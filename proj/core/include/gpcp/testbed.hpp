#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "gpcp/types.hpp"

namespace gpcp {

/// Axis-aligned hyperrectangle.
struct Box {
  Vector lower;
  Vector upper;

  [[nodiscard]] Index dim() const noexcept { return lower.size(); }
};

struct TestFunction {
  std::string name;
  int dim = 0;
  Box domain;
  std::function<double(PointView)> eval;

  [[nodiscard]] double operator()(PointView x) const { return eval(x); }
  [[nodiscard]] Vector evaluate(const Design& points) const;
};

/// One of goldstein_price, hartmann4, hartmann6, park, branin, becker2d.
/// Throws DomainError for any other name.
[[nodiscard]] TestFunction get_function(std::string_view name);
[[nodiscard]] std::vector<std::string> function_names();

/// Platform-independent uniform stream: 53-bit doubles strictly inside
/// (0, 1) drawn from mt19937_64.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

  [[nodiscard]] double next() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  [[nodiscard]] std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// n points drawn uniformly inside `domain`; deterministic in the seed.
[[nodiscard]] Design sample_uniform(const Box& domain, Index n, std::uint64_t seed);

}  // namespace gpcp
