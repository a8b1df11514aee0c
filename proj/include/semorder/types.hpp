#pragma once

#include <Eigen/Dense>

namespace semorder {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace semorder
