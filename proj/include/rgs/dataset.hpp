#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rgs/camera.hpp"
#include "rgs/image.hpp"

namespace rgs {

struct MissingFileError : std::runtime_error {
    explicit MissingFileError(const std::string& p) : std::runtime_error("missing file: " + p) {}
};
struct MalformedJsonError : std::runtime_error {
    explicit MalformedJsonError(const std::string& w) : std::runtime_error("malformed json: " + w) {}
};
struct NonInvertiblePoseError : std::runtime_error {
    explicit NonInvertiblePoseError(const std::string& w)
        : std::runtime_error("non-invertible pose: " + w) {}
};

struct Frame {
    std::string file_path;    // extension-free, relative to the dataset root
    Mat4 camera_to_world = Mat4::Identity();  // OpenGL axes: -z forward, +y up
    Scalar time_raw = 0;
    Scalar time = 0;          // normalized to [0, 1]
    Image image;              // float RGB in [0, 1]
};

struct Dataset {
    std::string root;
    std::string split = "train";
    int width = 0, height = 0;
    Scalar camera_angle_x = 0;
    Scalar fx = 0, fy = 0, cx = 0, cy = 0;
    Scalar time_min = 0, time_range = 0;  // native range; time = (raw - min) / range
    std::vector<Frame> frames;

    // Render camera for one frame: the OpenGL camera-to-world converted to a
    // +z-forward world-to-camera (rotation re-orthonormalized).
    Camera camera_for(int frame_idx) const;
};

// Converts an OpenGL-convention camera-to-world matrix into this renderer's
// world-to-camera (x right, y down, z forward).
Mat4 opengl_c2w_to_w2c(const Mat4& c2w);

// Reads <dir>/transforms_<split>.json and the referenced images. Images are
// loaded from a .pfm next to the named path when present (full precision),
// falling back to .png.
Dataset load_dataset(const std::string& dir, const std::string& split = "train",
                     bool load_images = true, int threads = 1);

// Writes transforms_<split>.json plus one .png and one .pfm per frame.
void save_dataset(const std::string& dir, const Dataset& dataset);

}  // namespace rgs
