#pragma once

#include <ostream>
#include <vector>

#include "rgs/dataset.hpp"
#include "rgs/knn.hpp"
#include "rgs/loss.hpp"
#include "rgs/optim.hpp"
#include "rgs/rasterizer.hpp"

namespace rgs {

struct TrainFrame {
    Camera cam;
    const Image* target = nullptr;
};

// Per-dimension extent (max - min, floored away from zero) of the store's
// 4D means; the normalization used by the consistency-loss neighborhoods.
Vec4 scene_scales(const GaussianStore& store);

// Image losses averaged over the frames; entropy and consistency added once.
// With grads non-null, fills per-parameter gradients of the total loss.
// knn may be null (consistency term skipped, e.g. weight zero).
LossBreakdown evaluate_loss(const GaussianStore& store, const std::vector<TrainFrame>& frames,
                            const LossWeights& weights, const Vec3& background,
                            const Knn4DIndex* knn, int threads, StoreGrads* grads);

struct StepMetrics {
    int step = 0;
    Scalar total = 0, l1 = 0, ssim = 0, entropy = 0, consistency = 0;
    Scalar psnr = 0;  // of the first batch frame
    int count = 0;    // Gaussians
};

struct TrainResult {
    GaussianStore store;
    std::vector<StepMetrics> metrics;
};

// Full optimization loop: batch sampling, Adam with schedules, staged SH
// unlock, periodic neighbor rebuild, densify/prune, and opacity resets.
// metrics_out, when set, receives one JSON line per logged step.
TrainResult train(const Dataset& dataset, const TrainConfig& config,
                  std::ostream* metrics_out = nullptr);

// Same loop starting from an existing store (used by tests and ablations).
TrainResult train_from(GaussianStore store, const Dataset& dataset, const TrainConfig& config,
                       std::ostream* metrics_out = nullptr);

}  // namespace rgs
