#include "gpcp/cholesky.hpp"

#include <cmath>

#include "gpcp/errors.hpp"

namespace gpcp {

Index try_cholesky_lower(const Matrix& a, Matrix& l) {
  const Index n = a.rows();
  l.setZero(n, n);
  for (Index j = 0; j < n; ++j) {
    const double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) {
      return j;
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    const Index below = n - j - 1;
    if (below > 0) {
      l.col(j).tail(below) =
          (a.col(j).tail(below) - l.block(j + 1, 0, below, j) * l.row(j).head(j).transpose()) / ljj;
    }
  }
  return -1;
}

Matrix cholesky_lower(const Matrix& a) {
  Matrix l;
  if (const Index pivot = try_cholesky_lower(a, l); pivot >= 0) {
    throw ConditioningError("kernel matrix is not numerically positive definite", pivot);
  }
  return l;
}

}  // namespace gpcp
