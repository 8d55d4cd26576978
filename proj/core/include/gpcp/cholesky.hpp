#pragma once

#include "gpcp/types.hpp"

namespace gpcp {

/// Lower Cholesky factor L with L Lᵀ = a. Only the lower triangle of `a` is
/// read. Throws ConditioningError with the failing pivot when a diagonal
/// entry becomes non-positive or non-finite.
[[nodiscard]] Matrix cholesky_lower(const Matrix& a);

/// Same factorization, reporting failure through the return value:
/// -1 on success, otherwise the failing pivot. `l` is overwritten.
[[nodiscard]] Index try_cholesky_lower(const Matrix& a, Matrix& l);

}  // namespace gpcp
