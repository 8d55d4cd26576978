#include "gpcp/testbed.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "gpcp/errors.hpp"

namespace gpcp {

namespace {

using std::numbers::pi;

Box cube(int d, double lo, double hi) { return {Vector::Constant(d, lo), Vector::Constant(d, hi)}; }

double goldstein_price(PointView x) {
  const double x1 = x(0);
  const double x2 = x(1);
  const double a = x1 + x2 + 1.0;
  const double b = 2.0 * x1 - 3.0 * x2;
  return (1.0 + a * a * (19.0 - 14.0 * x1 + 3.0 * x1 * x1 - 14.0 * x2 + 6.0 * x1 * x2 + 3.0 * x2 * x2)) *
         (30.0 + b * b * (18.0 - 32.0 * x1 + 12.0 * x1 * x1 + 48.0 * x2 - 36.0 * x1 * x2 + 27.0 * x2 * x2));
}

double branin(PointView x) {
  constexpr double b = 5.1 / (4.0 * pi * pi);
  constexpr double c = 5.0 / pi;
  constexpr double r = 6.0;
  constexpr double s = 10.0;
  constexpr double t = 1.0 / (8.0 * pi);
  const double q = x(1) - b * x(0) * x(0) + c * x(0) - r;
  return q * q + s * (1.0 - t) * std::cos(x(0)) + s;
}

// Hartmann constants shared by the 4- and 6-dimensional variants.
constexpr std::array<double, 4> kHartmannAlpha = {1.0, 1.2, 3.0, 3.2};
constexpr std::array<std::array<double, 6>, 4> kHartmannA = {{
    {10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
    {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
    {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
    {17.0, 8.0, 0.05, 10.0, 0.1, 14.0},
}};
constexpr std::array<std::array<double, 6>, 4> kHartmannP = {{
    {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
    {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
    {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
    {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381},
}};

double hartmann_sum(PointView x, int d) {
  double total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < d; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      const double diff = x(j) - kHartmannP[i][jj];
      inner += kHartmannA[i][jj] * diff * diff;
    }
    total += kHartmannAlpha[i] * std::exp(-inner);
  }
  return total;
}

double hartmann6(PointView x) { return -hartmann_sum(x, 6); }

// Rescaled 4-d variant on the first four coordinates.
double hartmann4(PointView x) { return (1.1 - hartmann_sum(x, 4)) / 0.839; }

// Park (1991), second function.
double park(PointView x) {
  return 2.0 / 3.0 * std::exp(x(0) + x(1)) - x(3) * std::sin(x(2)) + x(2);
}

// Fixed two-input instance built from Becker-style univariate bases
// (periodic, cubic, trigonometric) with one interaction term.
double becker2d(PointView x) {
  const double u = x(0) / pi;
  const double v = x(1) / pi;
  return 0.6 * std::sin(x(0)) + 0.4 * v * v * v + 0.3 * std::cos(2.0 * x(1)) + 0.25 * u * std::sin(x(1));
}

}  // namespace

Vector TestFunction::evaluate(const Design& points) const {
  Vector out(points.rows());
  for (Index i = 0; i < points.rows(); ++i) {
    out(i) = eval(points.row(i).transpose());
  }
  return out;
}

std::vector<std::string> function_names() {
  return {"goldstein_price", "hartmann4", "hartmann6", "park", "branin", "becker2d"};
}

TestFunction get_function(std::string_view name) {
  if (name == "goldstein_price") {
    return {"goldstein_price", 2, cube(2, -2.0, 2.0), goldstein_price};
  }
  if (name == "branin") {
    Box box{Vector(2), Vector(2)};
    box.lower << -5.0, 0.0;
    box.upper << 10.0, 15.0;
    return {"branin", 2, box, branin};
  }
  if (name == "hartmann4") {
    return {"hartmann4", 4, cube(4, 0.0, 1.0), hartmann4};
  }
  if (name == "hartmann6") {
    return {"hartmann6", 6, cube(6, 0.0, 1.0), hartmann6};
  }
  if (name == "park") {
    return {"park", 4, cube(4, 0.0, 1.0), park};
  }
  if (name == "becker2d") {
    return {"becker2d", 2, cube(2, -pi, pi), becker2d};
  }
  throw DomainError("unknown test function '" + std::string(name) + "'");
}

Design sample_uniform(const Box& domain, Index n, std::uint64_t seed) {
  if (n < 1) {
    throw DomainError("sample size must be at least 1");
  }
  if (domain.lower.size() != domain.upper.size() || !(domain.upper.array() > domain.lower.array()).all()) {
    throw DomainError("invalid sampling box");
  }
  UniformStream rng(seed);
  Design out(n, domain.dim());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < domain.dim(); ++j) {
      const double v = domain.lower(j) + rng.next() * (domain.upper(j) - domain.lower(j));
      out(i, j) = v < domain.upper(j) ? v : std::nextafter(domain.upper(j), domain.lower(j));
    }
  }
  return out;
}

}  // namespace gpcp
