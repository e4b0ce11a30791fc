#pragma once

#include "rgs/image.hpp"

namespace rgs {

// 1 - mean SSIM with an 11x11 Gaussian window (sigma 1.5), C1 = 0.01^2,
// C2 = 0.03^2 on unit dynamic range. The mean runs over the valid region
// (windows fully inside the image), so constant images match the
// closed-form SSIM exactly. Both dimensions must be >= 11.
Scalar ssim_loss(const Image& rendered, const Image& target);

// Same value, also writing dL/d rendered (zero outside the valid support).
Scalar ssim_loss_with_grad(const Image& rendered, const Image& target, Image* grad);

}  // namespace rgs
