#pragma once

#include <Eigen/Dense>

namespace rgs {

using Scalar = double;

using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
using Vec8 = Eigen::Matrix<Scalar, 8, 1>;
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
using Mat4 = Eigen::Matrix<Scalar, 4, 4>;
using Mat8 = Eigen::Matrix<Scalar, 8, 8>;

// RGB triple and 16-coefficient degree-3 SH block per color channel.
using ShCoeffs = Eigen::Matrix<Scalar, 3, 16>;

}  // namespace rgs
