#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rgs/dataset.hpp"
#include "rgs/gaussian.hpp"

namespace rgs {

struct InvalidSpecError : std::runtime_error {
    explicit InvalidSpecError(const std::string& w) : std::runtime_error("invalid spec: " + w) {}
};

struct Oscillation {
    Vec3 axis = Vec3::UnitZ();   // displacement direction (unit)
    Scalar amplitude = 0;
    Scalar period = 1;
};

struct BlobSpec {
    Vec3 center = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();    // world units per unit scene time
    Scalar radius = 0.2;             // isotropic 3D scale
    Vec3 color = Vec3::Ones();
    Scalar opacity = 0.9;
    Scalar t_start = 0, t_end = 1;   // existence window in scene time
    Oscillation oscillation;         // amplitude 0 = pure linear motion
    int segments = 8;                // short-lived pieces for oscillating paths
};

struct CameraRingSpec {
    int count = 20;
    int test_count = 5;
    Scalar radius = 4.0;
    Scalar elevation = 1.5;
};

struct SyntheticSceneSpec {
    std::vector<BlobSpec> blobs;
    CameraRingSpec cameras;
    int time_samples = 10;
    int image_size = 128;
    Scalar camera_angle_x = 0.7;
    Vec3 background = Vec3::Zero();

    void validate() const;
};

struct SyntheticScene {
    Dataset train;
    Dataset test;
    GaussianStore ground_truth;
};

// A rotor whose sliced Gaussian moves at exactly `velocity` (given the
// spatial/temporal scales it will be paired with). Exact to solver precision.
Rotor4 velocity_rotor(const Vec3& velocity, Scalar spatial_scale, Scalar temporal_scale);

SyntheticSceneSpec parse_scene_spec(const std::string& json_path);

// The desk-scale default: three moving blobs (linear, oscillating, and one
// existing only for part of the timeline), 20 train + 5 test cameras.
SyntheticSceneSpec default_scene_spec();

// Builds the ground-truth store from the primitives and renders every frame
// of both splits with the library's own rasterizer.
SyntheticScene generate_synthetic(const SyntheticSceneSpec& spec, int threads = 1);

}  // namespace rgs
