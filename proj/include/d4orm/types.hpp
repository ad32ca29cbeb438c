#pragma once

#include <Eigen/Dense>

namespace d4orm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace d4orm
