#pragma once

#include <stdexcept>
#include <string>

#include "rgs/image.hpp"

namespace rgs {

struct ImageIoError : std::runtime_error {
    explicit ImageIoError(const std::string& what) : std::runtime_error("image io: " + what) {}
};

// 8-bit PNG, values clamped to [0,1] and quantized with round-half-up.
void save_png(const std::string& path, const Image& img);
Image load_png(const std::string& path);  // -> floats in [0,1]

// Portable FloatMap ("PF"/"Pf"), little-endian, full float precision.
void save_pfm(const std::string& path, const Image& img);
Image load_pfm(const std::string& path);

// Maps a 2-or-more-channel flow image (u in ch 0, v in ch 1) to RGB via the
// conventional HSV flow wheel: hue = direction, saturation = magnitude.
// max_magnitude <= 0 normalizes by the image's own maximum.
Image flow_to_color(const Image& flow, Scalar max_magnitude = 0);

}  // namespace rgs
