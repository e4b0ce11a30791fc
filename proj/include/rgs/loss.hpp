#pragma once

#include <vector>

#include "rgs/gaussian.hpp"
#include "rgs/image.hpp"
#include "rgs/knn.hpp"

namespace rgs {

struct LossWeights {
    Scalar lambda_ssim = 0.2;
    Scalar lambda_entropy = 0.01;
    Scalar lambda_consistency = 0.05;
    int k_neighbors = 8;
};

// (1/N) sum -o log o, opacities clamped into [1e-6, 1-1e-6] first.
Scalar entropy_loss(const std::vector<Scalar>& opacities);

// Also writes dL/do (zero where the clamp was active).
Scalar entropy_loss_with_grad(const std::vector<Scalar>& opacities, std::vector<Scalar>* grad);

// (1/N) sum_i || s_i - (1/K) sum_{j in Omega_i} s_j ||_1 over per-Gaussian
// speeds. Neighbor indices are constants (no gradient through selection).
Scalar consistency_loss(const std::vector<Vec3>& speeds, const Knn4DIndex& index,
                        std::vector<Vec3>* dL_dspeed = nullptr);

struct LossBreakdown {
    Scalar l1 = 0, ssim = 0, entropy = 0, consistency = 0;
    Scalar total = 0;
};

// (1 - l1_w) L1 + l1_w Lssim + l2 Lentropy + l3 Lconsistent.
Scalar combine_losses(const LossWeights& w, Scalar l1, Scalar ssim, Scalar entropy,
                      Scalar consistency);

}  // namespace rgs
