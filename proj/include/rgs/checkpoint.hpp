#pragma once

#include <stdexcept>
#include <string>

#include "rgs/gaussian.hpp"

namespace rgs {

struct CheckpointError : std::runtime_error {
    explicit CheckpointError(const std::string& what) : std::runtime_error("checkpoint: " + what) {}
};

// Binary layout: magic "R4GS", then u32 version (= 1), u32 count, u32 SH
// degree, then per Gaussian 65 little-endian float32: mean (4), log scales
// (4), rotor (s, b01, b02, b03, b12, b13, b23, p), opacity logit, and 48 SH
// values channel-major (16 red, 16 green, 16 blue).
constexpr unsigned kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const GaussianStore& store);

// Rejects wrong magic or version; never coerces. Optimizer state starts zeroed.
GaussianStore load_checkpoint(const std::string& path);

}  // namespace rgs
