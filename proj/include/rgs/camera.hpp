#pragma once

#include <stdexcept>

#include "rgs/types.hpp"

namespace rgs {

/// Pinhole camera. world_to_camera maps world points into a frame with
/// +z in front of the camera (points with z > near are visible).
struct Camera {
    int width = 0, height = 0;
    Scalar fx = 0, fy = 0, cx = 0, cy = 0;
    Mat4 world_to_camera = Mat4::Identity();
    Scalar time = 0;

    Mat3 rotation() const { return world_to_camera.topLeftCorner<3, 3>(); }
    Vec3 translation() const { return world_to_camera.topRightCorner<3, 1>(); }
    Vec3 center() const { return -rotation().transpose() * translation(); }

    void validate() const {
        if (!(fx > 0) || !(fy > 0)) throw std::runtime_error("camera: focal lengths must be positive");
        Mat3 r = rotation();
        if (((r * r.transpose()) - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6)
            throw std::runtime_error("camera: rotation block not orthogonal");
    }
};

}  // namespace rgs
