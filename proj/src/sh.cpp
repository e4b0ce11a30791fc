#include "rgs/sh.hpp"

namespace rgs {
namespace {

constexpr Scalar C0 = kShC0;
constexpr Scalar C1 = 0.4886025119029199;
constexpr Scalar C2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                          -1.0925484305920792, 0.5462742152960396};
constexpr Scalar C3[7] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                          0.3731763325901154, -0.4570457994644658, 1.445305721320277,
                          -0.5900435899266435};

}  // namespace

void sh_basis(const Vec3& dir, int degree, ShBasis* basis, ShBasisGrad* grad) {
    const Scalar x = dir[0], y = dir[1], z = dir[2];
    ShBasis& b = *basis;
    b.setZero();
    if (grad) grad->setZero();

    b[0] = C0;
    if (degree >= 1) {
        b[1] = -C1 * y;
        b[2] = C1 * z;
        b[3] = -C1 * x;
        if (grad) {
            (*grad)(1, 1) = -C1;
            (*grad)(2, 2) = C1;
            (*grad)(3, 0) = -C1;
        }
    }
    if (degree >= 2) {
        const Scalar xx = x * x, yy = y * y, zz = z * z;
        b[4] = C2[0] * x * y;
        b[5] = C2[1] * y * z;
        b[6] = C2[2] * (2 * zz - xx - yy);
        b[7] = C2[3] * x * z;
        b[8] = C2[4] * (xx - yy);
        if (grad) {
            (*grad)(4, 0) = C2[0] * y;
            (*grad)(4, 1) = C2[0] * x;
            (*grad)(5, 1) = C2[1] * z;
            (*grad)(5, 2) = C2[1] * y;
            (*grad)(6, 0) = C2[2] * -2 * x;
            (*grad)(6, 1) = C2[2] * -2 * y;
            (*grad)(6, 2) = C2[2] * 4 * z;
            (*grad)(7, 0) = C2[3] * z;
            (*grad)(7, 2) = C2[3] * x;
            (*grad)(8, 0) = C2[4] * 2 * x;
            (*grad)(8, 1) = C2[4] * -2 * y;
        }
    }
    if (degree >= 3) {
        const Scalar xx = x * x, yy = y * y, zz = z * z;
        b[9] = C3[0] * y * (3 * xx - yy);
        b[10] = C3[1] * x * y * z;
        b[11] = C3[2] * y * (4 * zz - xx - yy);
        b[12] = C3[3] * z * (2 * zz - 3 * xx - 3 * yy);
        b[13] = C3[4] * x * (4 * zz - xx - yy);
        b[14] = C3[5] * z * (xx - yy);
        b[15] = C3[6] * x * (xx - 3 * yy);
        if (grad) {
            (*grad)(9, 0) = C3[0] * 6 * x * y;
            (*grad)(9, 1) = C3[0] * (3 * xx - 3 * yy);
            (*grad)(10, 0) = C3[1] * y * z;
            (*grad)(10, 1) = C3[1] * x * z;
            (*grad)(10, 2) = C3[1] * x * y;
            (*grad)(11, 0) = C3[2] * -2 * x * y;
            (*grad)(11, 1) = C3[2] * (4 * zz - xx - 3 * yy);
            (*grad)(11, 2) = C3[2] * 8 * y * z;
            (*grad)(12, 0) = C3[3] * -6 * x * z;
            (*grad)(12, 1) = C3[3] * -6 * y * z;
            (*grad)(12, 2) = C3[3] * (6 * zz - 3 * xx - 3 * yy);
            (*grad)(13, 0) = C3[4] * (4 * zz - 3 * xx - yy);
            (*grad)(13, 1) = C3[4] * -2 * x * y;
            (*grad)(13, 2) = C3[4] * 8 * x * z;
            (*grad)(14, 0) = C3[5] * 2 * x * z;
            (*grad)(14, 1) = C3[5] * -2 * y * z;
            (*grad)(14, 2) = C3[5] * (xx - yy);
            (*grad)(15, 0) = C3[6] * (3 * xx - 3 * yy);
            (*grad)(15, 1) = C3[6] * -6 * x * y;
        }
    }
}

Vec3 eval_sh(const ShCoeffs& sh, const Vec3& dir, int degree, bool* clamped_out) {
    ShBasis b;
    sh_basis(dir, degree, &b);
    Vec3 color = sh * b + Vec3::Constant(0.5);
    for (int ch = 0; ch < 3; ++ch) {
        bool clamped = color[ch] < 0;
        if (clamped) color[ch] = 0;
        if (clamped_out) clamped_out[ch] = clamped;
    }
    return color;
}

}  // namespace rgs
