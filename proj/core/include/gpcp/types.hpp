#pragma once

#include <Eigen/Dense>

namespace gpcp {

/// Design matrix: one point per row. Row-major so that a row maps onto a
/// contiguous `PointView` without copying.
using Design = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using PointView = Eigen::Ref<const Eigen::VectorXd>;
using Index = Eigen::Index;

}  // namespace gpcp
