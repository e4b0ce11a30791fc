#include "rgs/loss.hpp"

#include <algorithm>
#include <cmath>

namespace rgs {

namespace {
constexpr Scalar kOpacityClamp = 1e-6;
}

Scalar entropy_loss(const std::vector<Scalar>& opacities) {
    return entropy_loss_with_grad(opacities, nullptr);
}

Scalar entropy_loss_with_grad(const std::vector<Scalar>& opacities, std::vector<Scalar>* grad) {
    if (opacities.empty()) {
        if (grad) grad->clear();
        return 0;
    }
    if (grad) grad->assign(opacities.size(), 0);
    Scalar total = 0;
    const Scalar inv_n = 1 / (Scalar)opacities.size();
    for (size_t i = 0; i < opacities.size(); ++i) {
        Scalar o = std::clamp(opacities[i], kOpacityClamp, 1 - kOpacityClamp);
        total += -o * std::log(o);
        if (grad && opacities[i] > kOpacityClamp && opacities[i] < 1 - kOpacityClamp)
            (*grad)[i] = -(std::log(o) + 1) * inv_n;
    }
    return total * inv_n;
}

Scalar consistency_loss(const std::vector<Vec3>& speeds, const Knn4DIndex& index,
                        std::vector<Vec3>* dL_dspeed) {
    const int n = (int)speeds.size();
    if (n != index.store_size) throw StaleIndexError();
    if (dL_dspeed) dL_dspeed->assign(n, Vec3::Zero());
    if (n == 0) return 0;

    const Scalar inv_n = 1 / (Scalar)n;
    Scalar total = 0;
    for (int i = 0; i < n; ++i) {
        const auto& nbrs = index.neighbors[i];
        if (nbrs.empty()) continue;
        const Scalar inv_k = 1 / (Scalar)nbrs.size();
        Vec3 avg = Vec3::Zero();
        for (int j : nbrs) avg += speeds[j];
        avg *= inv_k;
        Vec3 diff = speeds[i] - avg;
        total += diff.cwiseAbs().sum();
        if (dL_dspeed) {
            Vec3 sgn = diff.unaryExpr([](Scalar v) { return Scalar(v > 0) - Scalar(v < 0); });
            (*dL_dspeed)[i] += inv_n * sgn;
            for (int j : nbrs) (*dL_dspeed)[j] -= inv_n * inv_k * sgn;
        }
    }
    return total * inv_n;
}

Scalar combine_losses(const LossWeights& w, Scalar l1, Scalar ssim, Scalar entropy,
                      Scalar consistency) {
    return (1 - w.lambda_ssim) * l1 + w.lambda_ssim * ssim + w.lambda_entropy * entropy +
           w.lambda_consistency * consistency;
}

}  // namespace rgs
