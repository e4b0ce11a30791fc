#include "rgs/rotor.hpp"

#include <array>
#include <cmath>

namespace rgs {
namespace {

// Each matrix entry is a quadratic form in the coefficients: sum of
// c * v[a] * v[b] terms. Entry order is row-major R[4*i+j].
struct QTerm {
    int a, b;
    Scalar c;
};
using TermList = std::array<QTerm, 8>;

// Unused tail slots have c == 0.
constexpr std::array<TermList, 16> kMapTerms = {{
    // R00
    {{{0, 0, 1}, {1, 1, -1}, {2, 2, -1}, {3, 3, -1}, {4, 4, 1}, {5, 5, 1}, {6, 6, 1}, {7, 7, -1}}},
    // R01
    {{{1, 0, 2}, {2, 4, -2}, {3, 5, -2}, {6, 7, 2}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
    // R02
    {{{1, 4, 2}, {2, 0, 2}, {3, 6, -2}, {5, 7, -2}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
    // R03
    {{{1, 5, 2}, {2, 6, 2}, {3, 0, 2}, {4, 7, 2}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
    // R10
    {{{1, 0, -2}, {2, 4, -2}, {3, 5, -2}, {6, 7, -2}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
    // R11
    {{{0, 0, 1}, {1, 1, -1}, {2, 2, 1}, {3, 3, 1}, {4, 4, -1}, {5, 5, -1}, {6, 6, 1}, {7, 7, -1}}},
    // R12
    {{{1, 2, -2}, {3, 7, 2}, {4, 0, 2}, {5, 6, -2}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
    // R13
    {{{1, 3, -2}, {2, 7, -2}, {4, 6, 2}, {5, 0, 2}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
    // R20
    {{{1, 4, 2}, {2, 0, -2}, {3, 6, -2}, {5, 7, 2}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
    // R21
    {{{1, 2, -2}, {3, 7, -2}, {4, 0, -2}, {5, 6, -2}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
    // R22
    {{{0, 0, 1}, {1, 1, 1}, {2, 2, -1}, {3, 3, 1}, {4, 4, -1}, {5, 5, 1}, {6, 6, -1}, {7, 7, -1}}},
    // R23
    {{{1, 7, 2}, {2, 3, -2}, {4, 5, -2}, {6, 0, 2}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
    // R30
    {{{1, 5, 2}, {2, 6, 2}, {3, 0, -2}, {4, 7, -2}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
    // R31
    {{{1, 3, -2}, {2, 7, 2}, {4, 6, 2}, {5, 0, -2}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
    // R32
    {{{1, 7, -2}, {2, 3, -2}, {4, 5, -2}, {6, 0, -2}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}},
    // R33
    {{{0, 0, 1}, {1, 1, 1}, {2, 2, 1}, {3, 3, -1}, {4, 4, 1}, {5, 5, -1}, {6, 6, -1}, {7, 7, -1}}},
}};

// Gradient of epsilon w.r.t. the coefficient vector.
Vec8 epsilon_gradient(const Vec8& v) {
    Vec8 g;
    g << v[7], -v[6], v[5], -v[4], -v[3], v[2], -v[1], v[0];
    return g;
}

// Constant Hessian of epsilon: pairs (s,p)=+1, (b01,b23)=-1, (b02,b13)=+1,
// (b03,b12)=-1, symmetric.
Mat8 epsilon_hessian() {
    Mat8 h = Mat8::Zero();
    h(0, 7) = h(7, 0) = 1;
    h(1, 6) = h(6, 1) = -1;
    h(2, 5) = h(5, 2) = 1;
    h(3, 4) = h(4, 3) = -1;
    return h;
}

constexpr Scalar kEpsBranch = 1e-12;

// Even-subalgebra blade masks in coefficient order, bits = e0..e3.
constexpr std::array<int, 8> kBladeMask = {0b0000, 0b0011, 0b0101, 0b1001,
                                           0b0110, 0b1010, 0b1100, 0b1111};

int blade_sign(int a, int b) {
    int sign = 1;
    int bb = b;
    while (bb) {
        int i = __builtin_ctz(bb);
        bb &= bb - 1;
        if (__builtin_popcount(a >> (i + 1)) & 1) sign = -sign;
    }
    return sign;
}

struct ComposeEntry {
    int target;
    int sign;
};

// 8x8 product table of the even subalgebra, built once.
const std::array<std::array<ComposeEntry, 8>, 8>& compose_table() {
    static const auto table = [] {
        std::array<std::array<ComposeEntry, 8>, 8> t{};
        for (int i = 0; i < 8; ++i) {
            for (int j = 0; j < 8; ++j) {
                int mask = kBladeMask[i] ^ kBladeMask[j];
                int target = -1;
                for (int k = 0; k < 8; ++k)
                    if (kBladeMask[k] == mask) target = k;
                t[i][j] = {target, blade_sign(kBladeMask[i], kBladeMask[j])};
            }
        }
        return t;
    }();
    return table;
}

}  // namespace

Scalar rotor_epsilon(const Rotor4& r) {
    return r.p * r.s - r.b01 * r.b23 + r.b02 * r.b13 - r.b03 * r.b12;
}

Rotor4 normalize(const Rotor4& r) {
    Vec8 v = r.coeffs();
    if (!v.allFinite()) throw NonFiniteRotorError();
    Scalar l2 = v.squaredNorm();
    if (!(l2 > 1e-20)) throw ZeroRotorError();
    Scalar eps = rotor_epsilon(r);
    if (std::abs(eps) >= kEpsBranch) {
        Scalar rad = std::max(l2 * l2 - 4 * eps * eps, Scalar(0));
        // Smaller root of eps delta^2 + l2 delta + eps = 0 in the
        // cancellation-free form.
        Scalar delta = -2 * eps / (l2 + std::sqrt(rad));
        v += delta * epsilon_gradient(v);
    }
    v /= v.norm();
    Rotor4 out = Rotor4::from_coeffs(v);
    if (!v.allFinite() || std::abs(rotor_epsilon(out)) > 1e-9 ||
        std::abs(v.squaredNorm() - 1) > 1e-9)
        throw NonFiniteRotorError();
    return out;
}

Mat8 normalize_jacobian(const Rotor4& r) {
    Vec8 v = r.coeffs();
    Scalar l2 = v.squaredNorm();
    if (!(l2 > 1e-20)) throw ZeroRotorError();
    Scalar eps = rotor_epsilon(r);
    Vec8 grad = epsilon_gradient(v);

    Mat8 j1;
    Vec8 updated = v;
    if (std::abs(eps) >= kEpsBranch) {
        Scalar rad = std::max(l2 * l2 - 4 * eps * eps, Scalar(0));
        Scalar sq = std::max(std::sqrt(rad), Scalar(1e-30));
        Scalar den = l2 + sq;
        Scalar delta = -2 * eps / den;
        // delta = -2 eps / (l2 + sqrt(l2^2 - 4 eps^2))
        Scalar ddelta_deps = -2 / den - 8 * eps * eps / (sq * den * den);
        Scalar ddelta_dl2 = 2 * eps * (1 + l2 / sq) / (den * den);
        Vec8 ddelta_dr = ddelta_deps * grad + ddelta_dl2 * 2 * v;
        updated = v + delta * grad;
        j1 = Mat8::Identity() + grad * ddelta_dr.transpose() + delta * epsilon_hessian();
    } else {
        // Smooth limit of the delta branch as eps -> 0; the correction
        // itself vanishes but its derivative does not.
        j1 = Mat8::Identity() - (grad * grad.transpose()) / l2;
    }

    Scalar len = updated.norm();
    Vec8 u = updated / len;
    Mat8 j2 = (Mat8::Identity() - u * u.transpose()) / len;
    return j2 * j1;
}

Mat4 to_matrix(const Rotor4& r) {
    Vec8 v = r.coeffs();
    if (std::abs(v.squaredNorm() - 1) > 1e-6 || std::abs(rotor_epsilon(r)) > 1e-6)
        throw NotNormalizedError();
    Mat4 m;
    for (int e = 0; e < 16; ++e) {
        Scalar val = 0;
        for (const QTerm& t : kMapTerms[e]) val += t.c * v[t.a] * v[t.b];
        m(e / 4, e % 4) = val;
    }
    return m;
}

RotorJacobian to_matrix_jacobian(const Rotor4& r) {
    Vec8 v = r.coeffs();
    RotorJacobian j = RotorJacobian::Zero();
    for (int e = 0; e < 16; ++e) {
        for (const QTerm& t : kMapTerms[e]) {
            if (t.c == 0) continue;
            j(e, t.a) += t.c * v[t.b];
            j(e, t.b) += t.c * v[t.a];
        }
    }
    return j;
}

Rotor4 from_quaternion(Scalar w, Scalar x, Scalar y, Scalar z) {
    if (std::abs(w * w + x * x + y * y + z * z - 1) > 1e-9) throw NotUnitQuaternionError();
    Rotor4 r;
    r.s = w;
    r.b01 = -z;
    r.b02 = y;
    r.b12 = -x;
    return r;
}

Rotor4 compose(const Rotor4& a, const Rotor4& b) {
    const auto& table = compose_table();
    Vec8 va = a.coeffs(), vb = b.coeffs();
    Vec8 out = Vec8::Zero();
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            const ComposeEntry& e = table[i][j];
            out[e.target] += e.sign * va[i] * vb[j];
        }
    return Rotor4::from_coeffs(out);
}

}  // namespace rgs
