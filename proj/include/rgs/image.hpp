#pragma once

#include <stdexcept>
#include <vector>

#include "rgs/types.hpp"

namespace rgs {

struct ShapeMismatchError : std::runtime_error {
    ShapeMismatchError() : std::runtime_error("image shape mismatch") {}
};

/// Row-major interleaved float image, `channels` values per pixel.
struct Image {
    int width = 0, height = 0, channels = 3;
    std::vector<Scalar> data;

    Image() = default;
    Image(int w, int h, int c) : width(w), height(h), channels(c), data((size_t)w * h * c, 0) {}

    Scalar& at(int x, int y, int c) { return data[((size_t)y * width + x) * channels + c]; }
    Scalar at(int x, int y, int c) const { return data[((size_t)y * width + x) * channels + c]; }
    size_t pixel_count() const { return (size_t)width * height; }
    bool same_shape(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// 10 log10(1 / MSE) over all channels, capped at 100 dB for identical images.
Scalar psnr(const Image& a, const Image& b);

Scalar l1_loss(const Image& rendered, const Image& target);
// dL/d rendered for the mean absolute difference (sign / N).
Image l1_loss_backward(const Image& rendered, const Image& target);

}  // namespace rgs
