#pragma once

#include <random>
#include <stdexcept>
#include <vector>

#include "rgs/gaussian.hpp"
#include "rgs/loss.hpp"

namespace rgs {

struct EmptySourceError : std::runtime_error {
    EmptySourceError() : std::runtime_error("initialize_scene: empty point source") {}
};
struct ShapeMismatchGradError : std::runtime_error {
    ShapeMismatchGradError() : std::runtime_error("adam_step: gradients not aligned with store") {}
};

struct TrainConfig {
    // Per-group learning rates. Position/time decay exponentially to
    // lr_position_final at total_steps; the rest stay constant.
    Scalar lr_position = 1.6e-4;
    Scalar lr_position_final = 1.6e-6;
    Scalar lr_scales = 5e-3;
    Scalar lr_rotor = 1e-3;
    Scalar lr_sh_dc = 2.5e-3;
    Scalar lr_sh_rest = 1.25e-4;
    Scalar lr_opacity = 0.05;

    int total_steps = 2000;
    int batch = 3;

    // Adaptive density control.
    Scalar densify_grad_threshold = 2e-4;
    int densify_from = 500;
    int densify_until = 15000;
    int densify_interval = 100;
    int opacity_reset_interval = 3000;
    Scalar prune_opacity = 0.005;
    Scalar percent_dense = 0.01;   // clone/split size boundary as fraction of extent
    Scalar split_factor = 1.6;
    Scalar reset_opacity_value = 0.01;
    int min_gaussians = 16;
    int max_gaussians = 200000;

    LossWeights loss;
    Vec3 background = Vec3::Zero();
    bool static_mode = false;

    // Initialization.
    int init_count = 2000;
    Vec3 box_min = Vec3(-1.3, -1.3, -1.3);
    Vec3 box_max = Vec3(1.3, 1.3, 1.3);
    Scalar init_time_scale = 0.1414;
    Scalar init_opacity = 0.1;

    int knn_rebuild_interval = 100;
    int sh_unlock_interval = 1000;
    int log_interval = 50;
    int threads = 0;   // 0 = default_threads()
    unsigned seed = 0;

    void validate() const;
};

// Temporal scale (not log) used when static_mode freezes time: large enough
// that the decay factor and the visibility gate are always ~1 / always open.
constexpr Scalar kStaticTemporalScale = 1e3;

// Adam hyperparameters shared by every group.
constexpr Scalar kAdamBeta1 = 0.9;
constexpr Scalar kAdamBeta2 = 0.999;
constexpr Scalar kAdamEps = 1e-15;

// lr_init * (lr_final / lr_init)^(step / total).
Scalar lr_schedule(int step, int total, Scalar lr_init, Scalar lr_final);

// Uniform positions in the spatial box, times uniform in [0, 1], 3D scales
// from the nearest spatial neighbor, identity rotors, mid-gray DC color.
GaussianStore initialize_scene(const TrainConfig& config, std::mt19937_64& rng);

// Same recipe seeded from explicit 4D points (and optional colors).
GaussianStore initialize_scene(const std::vector<Vec4>& points, const std::vector<Vec3>& colors,
                               const TrainConfig& config);

// One bias-corrected Adam update (step is 1-based); rotors re-normalized
// afterwards. static_mode keeps the spatio-temporal components frozen.
void adam_step(GaussianStore& store, const StoreGrads& grads, const TrainConfig& config, int step);

// Folds one view's view-space positional gradient norms into the running
// densification statistics (only Gaussians hit by that view count).
void accumulate_stats(GaussianStore& store, const StoreGrads& view_grads);

struct DensifyReport {
    int cloned = 0, split = 0, pruned = 0;
};

DensifyReport densify_and_prune(GaussianStore& store, const TrainConfig& config,
                                Scalar scene_extent, std::mt19937_64& rng);

// Every opacity -> min(opacity, reset value), in probability space.
void reset_opacity(GaussianStore& store, Scalar value = 0.01);

}  // namespace rgs
