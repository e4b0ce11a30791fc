#pragma once

#include "rgs/types.hpp"

namespace rgs {

// Degree-0 basis constant, used to convert between RGB and DC coefficients.
constexpr Scalar kShC0 = 0.28209479177387814;

using ShBasis = Eigen::Matrix<Scalar, 16, 1>;
using ShBasisGrad = Eigen::Matrix<Scalar, 16, 3>;  // d basis / d unit direction

// Real SH basis values up to degree 3 at a unit direction; coefficients
// beyond (degree+1)^2 are zeroed. Optionally also the derivative w.r.t.
// the (unnormalized is handled by the caller) direction components.
void sh_basis(const Vec3& dir, int degree, ShBasis* basis, ShBasisGrad* grad = nullptr);

// Color = sum_k sh[:,k] * basis[k] + 0.5, clamped at 0 from below.
// clamped_out marks channels that hit the clamp (zero gradient there).
Vec3 eval_sh(const ShCoeffs& sh, const Vec3& dir, int degree,
             bool* clamped_out = nullptr);

}  // namespace rgs
