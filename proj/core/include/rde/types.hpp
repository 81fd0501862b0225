#pragma once

#include <Eigen/Core>

namespace rde {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Covariance representation used for the reference distribution and for
/// moment propagation.
enum class CovarianceMode { kDiagonal, kLowRank };

}  // namespace rde
