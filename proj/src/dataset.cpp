#include "rgs/dataset.hpp"

#include <json.hpp>

#include <Eigen/SVD>
#include <filesystem>
#include <fstream>

#include "rgs/parallel.hpp"
#include "rgs/png_io.hpp"

namespace rgs {

namespace fs = std::filesystem;
using nlohmann::json;

Mat4 opengl_c2w_to_w2c(const Mat4& c2w) {
    Mat3 r = c2w.topLeftCorner<3, 3>();
    if ((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-3)
        throw NonInvertiblePoseError("rotation block not orthogonal");
    // Snap to the nearest rotation so downstream checks at 1e-6 pass.
    Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    r = svd.matrixU() * svd.matrixV().transpose();
    Vec3 t = c2w.topRightCorner<3, 1>();

    Mat4 w2c = Mat4::Identity();
    w2c.topLeftCorner<3, 3>() = r.transpose();
    w2c.topRightCorner<3, 1>() = -r.transpose() * t;
    // OpenGL cameras look down -z with +y up; ours look down +z with +y down.
    Mat4 flip = Mat4::Identity();
    flip(1, 1) = -1;
    flip(2, 2) = -1;
    return flip * w2c;
}

Camera Dataset::camera_for(int frame_idx) const {
    const Frame& f = frames.at(frame_idx);
    Camera cam;
    cam.width = width;
    cam.height = height;
    cam.fx = fx;
    cam.fy = fy;
    cam.cx = cx;
    cam.cy = cy;
    cam.world_to_camera = opengl_c2w_to_w2c(f.camera_to_world);
    cam.time = f.time;
    return cam;
}

namespace {

Image load_frame_image(const fs::path& root, const std::string& file_path) {
    fs::path base = root / file_path;
    fs::path pfm = base;
    pfm += ".pfm";
    if (fs::exists(pfm)) return load_pfm(pfm.string());
    fs::path png = base;
    png += ".png";
    if (fs::exists(png)) return load_png(png.string());
    if (fs::exists(base)) return load_png(base.string());
    throw MissingFileError(base.string() + "(.pfm|.png)");
}

}  // namespace

Dataset load_dataset(const std::string& dir, const std::string& split, bool load_images,
                     int threads) {
    fs::path root(dir);
    fs::path jpath = root / ("transforms_" + split + ".json");
    std::ifstream in(jpath);
    if (!in) throw MissingFileError(jpath.string());

    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw MalformedJsonError(e.what());
    }

    Dataset ds;
    ds.root = dir;
    ds.split = split;
    try {
        ds.camera_angle_x = j.at("camera_angle_x").get<Scalar>();
        for (const auto& jf : j.at("frames")) {
            Frame f;
            f.file_path = jf.at("file_path").get<std::string>();
            const auto& m = jf.at("transform_matrix");
            if (m.size() != 4) throw MalformedJsonError("transform_matrix not 4x4");
            for (int r = 0; r < 4; ++r) {
                if (m[r].size() != 4) throw MalformedJsonError("transform_matrix not 4x4");
                for (int c = 0; c < 4; ++c) f.camera_to_world(r, c) = m[r][c].get<Scalar>();
            }
            f.time_raw = jf.value("time", Scalar(0));
            ds.frames.push_back(std::move(f));
        }
    } catch (const json::exception& e) {
        throw MalformedJsonError(e.what());
    }
    if (ds.frames.empty()) throw MalformedJsonError("no frames in " + jpath.string());

    // Validate poses up front so errors surface before image loading.
    for (const auto& f : ds.frames) (void)opengl_c2w_to_w2c(f.camera_to_world);

    Scalar tmin = ds.frames[0].time_raw, tmax = tmin;
    for (const auto& f : ds.frames) {
        tmin = std::min(tmin, f.time_raw);
        tmax = std::max(tmax, f.time_raw);
    }
    ds.time_min = tmin;
    ds.time_range = tmax - tmin;
    for (auto& f : ds.frames)
        f.time = ds.time_range > 0 ? (f.time_raw - tmin) / ds.time_range : Scalar(0);

    if (load_images) {
        parallel_for(0, (int)ds.frames.size(), threads,
                     [&](int i) { ds.frames[i].image = load_frame_image(root, ds.frames[i].file_path); });
        for (const auto& f : ds.frames)
            if (f.image.width != ds.frames[0].image.width ||
                f.image.height != ds.frames[0].image.height)
                throw MalformedJsonError("frames disagree on image dimensions");
        ds.width = ds.frames[0].image.width;
        ds.height = ds.frames[0].image.height;
    }
    if (ds.width > 0) {
        ds.fx = ds.fy = 0.5 * ds.width / std::tan(ds.camera_angle_x / 2);
        ds.cx = ds.width / Scalar(2);
        ds.cy = ds.height / Scalar(2);
    }
    return ds;
}

void save_dataset(const std::string& dir, const Dataset& dataset) {
    fs::path root(dir);
    fs::create_directories(root);

    json j;
    j["camera_angle_x"] = dataset.camera_angle_x;
    j["frames"] = json::array();
    for (const auto& f : dataset.frames) {
        json jf;
        jf["file_path"] = f.file_path;
        jf["time"] = f.time_raw;
        json m = json::array();
        for (int r = 0; r < 4; ++r) {
            json row = json::array();
            for (int c = 0; c < 4; ++c) row.push_back(f.camera_to_world(r, c));
            m.push_back(row);
        }
        jf["transform_matrix"] = m;
        j["frames"].push_back(jf);
    }
    fs::path jpath = root / ("transforms_" + dataset.split + ".json");
    std::ofstream out(jpath);
    if (!out) throw MissingFileError(jpath.string());
    out << j.dump(2) << "\n";

    for (const auto& f : dataset.frames) {
        fs::path base = root / f.file_path;
        fs::create_directories(base.parent_path());
        save_png(base.string() + ".png", f.image);
        save_pfm(base.string() + ".pfm", f.image);
    }
}

}  // namespace rgs
