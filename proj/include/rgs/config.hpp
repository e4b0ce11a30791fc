#pragma once

#include <stdexcept>
#include <string>

#include "rgs/optim.hpp"

namespace rgs {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& w) : std::runtime_error("config: " + w) {}
};

// Flat "key = value" text ('#' starts a comment). Every key maps onto one
// TrainConfig field; unknown keys are errors. Vec3 values are comma-separated.
TrainConfig parse_config_text(const std::string& text);
TrainConfig parse_config_file(const std::string& path);

}  // namespace rgs
