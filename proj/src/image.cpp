#include "rgs/image.hpp"

#include <cmath>

namespace rgs {

Scalar psnr(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw ShapeMismatchError();
    Scalar mse = 0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        Scalar d = a.data[i] - b.data[i];
        mse += d * d;
    }
    mse /= (Scalar)a.data.size();
    if (mse <= 0) return 100;
    return std::min(Scalar(100), 10 * std::log10(1 / mse));
}

Scalar l1_loss(const Image& rendered, const Image& target) {
    if (!rendered.same_shape(target)) throw ShapeMismatchError();
    Scalar sum = 0;
    for (size_t i = 0; i < rendered.data.size(); ++i)
        sum += std::abs(rendered.data[i] - target.data[i]);
    return sum / (Scalar)rendered.data.size();
}

Image l1_loss_backward(const Image& rendered, const Image& target) {
    if (!rendered.same_shape(target)) throw ShapeMismatchError();
    Image g(rendered.width, rendered.height, rendered.channels);
    Scalar inv_n = 1 / (Scalar)rendered.data.size();
    for (size_t i = 0; i < rendered.data.size(); ++i) {
        Scalar d = rendered.data[i] - target.data[i];
        g.data[i] = d > 0 ? inv_n : (d < 0 ? -inv_n : 0);
    }
    return g;
}

}  // namespace rgs
