#pragma once

#include <stdexcept>

#include "rgs/types.hpp"

namespace rgs {

/// 4D rotor: even-grade element of the Clifford algebra over (x, y, z, t).
/// The first four coefficients (s, b01, b02, b12) carry the spatial
/// rotation (quaternion part); (b03, b13, b23, p) couple space and time.
/// Coefficient vector order throughout: s, b01, b02, b03, b12, b13, b23, p.
struct Rotor4 {
    Scalar s = 1;
    Scalar b01 = 0, b02 = 0, b03 = 0;
    Scalar b12 = 0, b13 = 0, b23 = 0;
    Scalar p = 0;

    static Rotor4 identity() { return Rotor4{}; }

    static Rotor4 from_coeffs(const Vec8& v) {
        return Rotor4{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
    }

    Vec8 coeffs() const {
        Vec8 v;
        v << s, b01, b02, b03, b12, b13, b23, p;
        return v;
    }
};

// d R4D[4*i+j] / d coeff[k], 16 rows by 8 columns.
using RotorJacobian = Eigen::Matrix<Scalar, 16, 8>;

struct ZeroRotorError : std::runtime_error {
    ZeroRotorError() : std::runtime_error("normalize: zero rotor") {}
};
struct NonFiniteRotorError : std::runtime_error {
    NonFiniteRotorError() : std::runtime_error("normalize: result violates rotor invariants") {}
};
struct NotNormalizedError : std::runtime_error {
    NotNormalizedError() : std::runtime_error("to_matrix: rotor not normalized") {}
};
struct NotUnitQuaternionError : std::runtime_error {
    NotUnitQuaternionError() : std::runtime_error("from_quaternion: quaternion not unit length") {}
};

// ps - b01*b23 + b02*b13 - b03*b12; zero iff r r-dagger has no e0123 part.
Scalar rotor_epsilon(const Rotor4& r);

// Two-step normalization: shift along the epsilon gradient to kill the
// pseudoscalar of r r-dagger, then rescale to unit length.
Rotor4 normalize(const Rotor4& r);

// 8x8 derivative of normalize() output coefficients w.r.t. inputs,
// consistent with the branch normalize() takes.
Mat8 normalize_jacobian(const Rotor4& r);

// Closed-form 4x4 rotation matrix of a normalized rotor. Rows/columns in
// x, y, z, t order; satisfies to_matrix(r) * u == grade-1 of r u r-dagger.
Mat4 to_matrix(const Rotor4& r);

// Analytic 16x8 derivative of the to_matrix entries (quadratic forms).
RotorJacobian to_matrix_jacobian(const Rotor4& r);

// Embed a unit quaternion (w, x, y, z) as a purely spatial rotor.
Rotor4 from_quaternion(Scalar w, Scalar x, Scalar y, Scalar z);

// Geometric product a * b; composition of the rotations they represent.
Rotor4 compose(const Rotor4& a, const Rotor4& b);

}  // namespace rgs
