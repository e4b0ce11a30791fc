#pragma once

#include <stdexcept>
#include <vector>

#include "rgs/rotor.hpp"
#include "rgs/types.hpp"

namespace rgs {

/// One 4D Gaussian primitive. Scales are stored as logarithms; opacity as
/// a logit. SH rows are R, G, B; 16 degree-3 coefficients each, DC first.
struct Gaussian4D {
    Vec4 mean = Vec4::Zero();         // x, y, z in world units; t in [0,1] scene time
    Vec4 log_scales = Vec4::Zero();
    Rotor4 rotor;
    Scalar opacity_logit = 0;
    ShCoeffs sh = ShCoeffs::Zero();
};

/// Result of slicing a 4D Gaussian at a fixed time.
struct SlicedGaussian3D {
    Vec3 mean = Vec3::Zero();
    Mat3 cov = Mat3::Identity();
    Scalar decay = 1;
    Vec3 speed = Vec3::Zero();   // V / W, world units per unit scene time
    Scalar lambda = 1;           // 1 / W
    int source_index = -1;
};

struct DegenerateTimeError : std::runtime_error {
    DegenerateTimeError() : std::runtime_error("slice_at: temporal scale collapsed (W < 1e-12)") {}
};

// Intermediates kept from the forward slice for the backward pass.
struct SliceCache {
    Rotor4 normalized;
    Mat4 R;
    Vec4 q;       // squared scales exp(2 log_s)
    Mat3 U;
    Vec3 V;
    Scalar W = 1;
    Scalar dt = 0;
    Scalar decay = 1;
};

// Gradients of a scalar loss w.r.t. one Gaussian's parameters. Rotor
// gradients are w.r.t. the stored (pre-normalization) coefficients.
struct GaussianParamGrad {
    Vec4 d_mean = Vec4::Zero();
    Vec4 d_log_scales = Vec4::Zero();
    Vec8 d_rotor = Vec8::Zero();
    Scalar d_opacity_logit = 0;
    ShCoeffs d_sh = ShCoeffs::Zero();
};

constexpr Scalar kCov3Epsilon = 1e-9;      // diagonal regularizer on the sliced covariance
constexpr Scalar kTemporalFloor = 1e-12;   // W below this is degenerate
constexpr Scalar kVisibilityThreshold = 16;  // cutoff on lambda * dt^2

Mat4 assemble_covariance(const Gaussian4D& g);

// Schur-form slice: cov3 = U - V V^T / W, never inverting the 4x4.
SlicedGaussian3D slice_at(const Gaussian4D& g, Scalar t, SliceCache* cache = nullptr);

bool is_visible(const Gaussian4D& g, Scalar t);

// Accumulates into *out. dL_dcov3 uses the independent-entry convention
// (each of the 9 entries differentiated separately).
void slice_backward(const Gaussian4D& g, const SliceCache& c, const Mat3& dL_dcov3,
                    const Vec3& dL_dmean3, Scalar dL_ddecay, const Vec3& dL_dspeed,
                    GaussianParamGrad* out);

// Speed V/W of a Gaussian independent of t, with optional cache for backward.
Vec3 gaussian_speed(const Gaussian4D& g, SliceCache* cache = nullptr);

/// Growable set of 4D Gaussians with optimizer state and densification
/// statistics, stored as parallel arrays.
struct GaussianStore {
    std::vector<Vec4> mean;
    std::vector<Vec4> log_scales;
    std::vector<Rotor4> rotor;
    std::vector<Scalar> opacity_logit;
    std::vector<ShCoeffs> sh;
    int active_sh_degree = 0;

    // Adam first/second moments, parallel to the parameters.
    std::vector<Vec4> m_mean, v_mean, m_ls, v_ls;
    std::vector<Vec8> m_rot, v_rot;
    std::vector<Scalar> m_op, v_op;
    std::vector<ShCoeffs> m_sh, v_sh;

    // Accumulated view-space positional gradient norms and hit counts.
    std::vector<Scalar> grad_accum;
    std::vector<int> grad_count;

    int size() const { return static_cast<int>(mean.size()); }
    Gaussian4D get(int i) const;
    void push_back(const Gaussian4D& g);
    void remove_indices(const std::vector<int>& sorted_indices);
    void reset_stats();
    Scalar opacity(int i) const;
};

/// Per-parameter gradients for a whole store.
struct StoreGrads {
    std::vector<GaussianParamGrad> g;
    std::vector<Scalar> viewspace_norm;  // ||dL/dmean2|| per Gaussian for this view
    std::vector<uint8_t> visible;        // splat produced for this view

    void resize(int n) {
        g.assign(n, GaussianParamGrad{});
        viewspace_norm.assign(n, 0);
        visible.assign(n, 0);
    }
    void add(const StoreGrads& other);
    void scale(Scalar f);
    int size() const { return static_cast<int>(g.size()); }
};

}  // namespace rgs
