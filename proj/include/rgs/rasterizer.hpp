#pragma once

#include <optional>
#include <vector>

#include "rgs/camera.hpp"
#include "rgs/gaussian.hpp"
#include "rgs/image.hpp"
#include "rgs/sh.hpp"

namespace rgs {

constexpr int kTileSize = 16;
constexpr Scalar kNearPlane = 0.2;
constexpr Scalar kAlphaClamp = 0.99;
constexpr Scalar kMinAlpha = 1.0 / 255.0;
constexpr Scalar kStopTransmittance = 1e-4;
constexpr Scalar kCovDilation = 0.3;  // pixel dilation added to the 2x2 screen covariance

/// Screen-space footprint of one sliced Gaussian.
struct Splat2D {
    Vec2 mean2 = Vec2::Zero();
    Vec3 conic = Vec3::Zero();  // (a, b, c): inverse screen covariance [[a,b],[b,c]]
    Scalar depth = 0;
    Vec3 color = Vec3::Zero();
    Scalar alpha_base = 0;      // opacity * temporal decay
    Vec2 flow2 = Vec2::Zero();  // pixels per unit scene time
    int source_index = -1;
    Scalar radius = 0;          // 3-sigma screen radius
};

// Forward intermediates retained per splat for the backward pass.
struct ProjectCache {
    SliceCache slice;
    Mat3 cov3 = Mat3::Identity();
    Vec3 mean3 = Vec3::Zero();
    Vec3 speed = Vec3::Zero();
    Scalar decay = 1;
    Vec3 p_cam = Vec3::Zero();
    Eigen::Matrix<Scalar, 2, 3> T = Eigen::Matrix<Scalar, 2, 3>::Zero();  // J * R_wc
    Mat2 cov2 = Mat2::Identity();  // dilated screen covariance
    Vec3 dir = Vec3::UnitZ();
    Scalar view_dist = 1;
    ShBasis basis = ShBasis::Zero();
    ShBasisGrad basis_grad = ShBasisGrad::Zero();
    bool clamped[3] = {false, false, false};
    Scalar opacity = 0;
};

// Projects one sliced Gaussian; nullopt when culled (behind the near
// plane, footprint off-screen, or effective opacity below 1/255).
std::optional<Splat2D> project(const SlicedGaussian3D& s, const Camera& cam,
                               const ShCoeffs& sh, int sh_degree, Scalar opacity_logit,
                               ProjectCache* cache = nullptr);

struct RenderOptions {
    Vec3 background = Vec3::Zero();
    int threads = 1;
    bool retain_records = false;
};

struct RenderRecords {
    std::vector<Splat2D> splats;
    std::vector<ProjectCache> caches;            // parallel to splats when retained
    std::vector<std::vector<int>> tile_splats;   // depth-sorted splat ids per tile
    std::vector<Scalar> final_T;                 // per pixel
    std::vector<int> n_contrib;                  // per pixel: count of blended splats
    int tiles_x = 0, tiles_y = 0;
    Vec3 background = Vec3::Zero();
    bool retained = false;
};

struct RenderOutput {
    Image image;
    RenderRecords records;
};

struct MissingRecordsError : std::runtime_error {
    MissingRecordsError() : std::runtime_error("rasterize_backward: forward pass did not retain records") {}
};

// Slices the store at cam.time, projects, and rasterizes front to back.
RenderOutput render_forward(const GaussianStore& store, const Camera& cam,
                            const RenderOptions& opts);

// Tiled alpha blending of already-projected splats (no store needed).
// Used directly by tests; render_forward delegates to it.
void rasterize_forward(const std::vector<Splat2D>& splats, const Camera& cam,
                       const Vec3& background, int threads, Image* image,
                       RenderRecords* records);

// Full backward: dL/dimage -> per-Gaussian parameter gradients, chained
// through blending, projection, SH, and slicing.
StoreGrads render_backward(const GaussianStore& store, const Camera& cam,
                           const RenderRecords& records, const Image& dL_dimage,
                           int threads);

// Same blending as the color path but with screen-space velocity as the
// payload and zero background. Channels: (flow_x, flow_y).
Image render_flow(const GaussianStore& store, const Camera& cam, int threads);

}  // namespace rgs
