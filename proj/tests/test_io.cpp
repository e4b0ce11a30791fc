#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "rgs/checkpoint.hpp"
#include "rgs/config.hpp"
#include "rgs/dataset.hpp"
#include "rgs/png_io.hpp"
#include "rgs/rasterizer.hpp"
#include "rgs/synthetic.hpp"

using namespace rgs;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
    fs::path p = fs::temp_directory_path() / "rgs_test_io";
    fs::create_directories(p);
    return p;
}

GaussianStore random_store(int n) {
    GaussianStore store;
    store.active_sh_degree = 2;
    for (int i = 0; i < n; ++i) {
        Gaussian4D g;
        for (int a = 0; a < 4; ++a) g.mean[a] = oracle::uniform(-1, 1);
        for (int a = 0; a < 4; ++a) g.log_scales[a] = oracle::uniform(-2, 0);
        g.rotor = oracle::random_unit_rotor();
        g.opacity_logit = oracle::uniform(-2, 2);
        for (int k = 0; k < 48; ++k) g.sh(k % 3, k / 3) = oracle::uniform(-1, 1);
        store.push_back(g);
    }
    return store;
}

std::vector<char> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("checkpoint round-trip is bit-exact") {
    auto dir = tmp_dir();
    GaussianStore store = random_store(17);
    fs::path p1 = dir / "a.r4gs", p2 = dir / "b.r4gs";
    save_checkpoint(p1.string(), store);

    GaussianStore loaded = load_checkpoint(p1.string());
    REQUIRE(loaded.size() == store.size());
    CHECK(loaded.active_sh_degree == store.active_sh_degree);
    // Values agree to float32 precision on first save...
    for (int i = 0; i < store.size(); ++i)
        CHECK((loaded.mean[i] - store.mean[i]).cwiseAbs().maxCoeff() <= 1e-6);
    // ...and the save(load(save)) cycle is bit-identical.
    save_checkpoint(p2.string(), loaded);
    CHECK(read_bytes(p1) == read_bytes(p2));
    GaussianStore again = load_checkpoint(p2.string());
    for (int i = 0; i < store.size(); ++i) {
        CHECK(again.mean[i] == loaded.mean[i]);
        CHECK(again.log_scales[i] == loaded.log_scales[i]);
        CHECK((again.rotor[i].coeffs() == loaded.rotor[i].coeffs()));
        CHECK(again.opacity_logit[i] == loaded.opacity_logit[i]);
        CHECK(again.sh[i] == loaded.sh[i]);
    }
}

TEST_CASE("checkpoint rejects bad magic and version") {
    auto dir = tmp_dir();
    fs::path p = dir / "bad.r4gs";
    {
        std::ofstream out(p, std::ios::binary);
        out << "NOPE";
        std::uint32_t rest[3] = {1, 0, 0};
        out.write((const char*)rest, sizeof(rest));
    }
    CHECK_THROWS_AS(load_checkpoint(p.string()), CheckpointError);
    {
        std::ofstream out(p, std::ios::binary);
        out << "R4GS";
        std::uint32_t rest[3] = {99, 0, 0};  // wrong version
        out.write((const char*)rest, sizeof(rest));
    }
    CHECK_THROWS_AS(load_checkpoint(p.string()), CheckpointError);
    CHECK_THROWS_AS(load_checkpoint((dir / "missing.r4gs").string()), CheckpointError);
}

TEST_CASE("pfm round-trip preserves float32 images exactly") {
    auto dir = tmp_dir();
    Image img(9, 7, 3);
    for (auto& v : img.data) v = (float)oracle::uniform(-3, 3);  // already float32 values
    fs::path p = dir / "img.pfm";
    save_pfm(p.string(), img);
    Image back = load_pfm(p.string());
    REQUIRE(back.same_shape(img));
    for (size_t i = 0; i < img.data.size(); ++i) CHECK(back.data[i] == img.data[i]);
}

TEST_CASE("png round-trip quantizes with round half-up") {
    auto dir = tmp_dir();
    Image img(8, 5, 3);
    for (auto& v : img.data) v = oracle::uniform(-0.1, 1.1);
    fs::path p = dir / "img.png";
    save_png(p.string(), img);
    Image back = load_png(p.string());
    REQUIRE(back.same_shape(img));
    for (size_t i = 0; i < img.data.size(); ++i) {
        Scalar clamped = std::clamp(img.data[i], 0.0, 1.0);
        Scalar expected = std::floor(clamped * 255.0 + 0.5) / 255.0;
        CHECK(back.data[i] == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("psnr definition and cap") {
    Image a(4, 4, 3), b(4, 4, 3);
    CHECK(psnr(a, a) == 100.0);
    for (auto& v : b.data) v = 0.1;  // MSE = 0.01
    CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-9));
    for (auto& v : b.data) v = 0.01;  // MSE = 1e-4
    CHECK(psnr(a, b) == doctest::Approx(40.0).epsilon(1e-9));
}

TEST_CASE("dataset save/load round-trip: poses to 1e-12, times exact") {
    auto dir = tmp_dir() / "ds";
    fs::remove_all(dir);
    Dataset ds;
    ds.split = "train";
    ds.width = ds.height = 32;
    ds.camera_angle_x = 0.8;
    ds.fx = ds.fy = 0.5 * 32 / std::tan(0.4);
    ds.cx = ds.cy = 16;
    for (int i = 0; i < 3; ++i) {
        Frame f;
        f.file_path = "train/r_" + std::to_string(i);
        Mat3 rot = Eigen::AngleAxis<Scalar>(0.3 * i, Vec3(1, 2, 3).normalized()).matrix();
        f.camera_to_world = Mat4::Identity();
        f.camera_to_world.topLeftCorner<3, 3>() = rot;
        f.camera_to_world.topRightCorner<3, 1>() = Vec3(0.1 * i, -0.2, 3 + i);
        f.time_raw = 5.0 * i;  // native range [0, 10]
        f.time = f.time_raw / 10;
        f.image = Image(32, 32, 3);
        for (auto& v : f.image.data) v = oracle::uniform(0, 1);
        ds.frames.push_back(std::move(f));
    }
    save_dataset(dir.string(), ds);
    Dataset back = load_dataset(dir.string(), "train");
    REQUIRE(back.frames.size() == 3);
    CHECK(back.time_min == 0.0);
    CHECK(back.time_range == 10.0);
    for (int i = 0; i < 3; ++i) {
        CHECK((back.frames[i].camera_to_world - ds.frames[i].camera_to_world)
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
        CHECK(back.frames[i].time == ds.frames[i].time);
        // PFM sidecar preferred: pixels match to float32 exactly.
        for (size_t k = 0; k < ds.frames[i].image.data.size(); ++k)
            CHECK(back.frames[i].image.data[k] == (float)ds.frames[i].image.data[k]);
    }
    CHECK(back.fx == doctest::Approx(ds.fx).epsilon(1e-12));
}

TEST_CASE("dataset loader rejects bad input") {
    auto dir = tmp_dir() / "bad_ds";
    fs::remove_all(dir);
    fs::create_directories(dir);
    CHECK_THROWS_AS(load_dataset(dir.string(), "train"), MissingFileError);
    std::ofstream(dir / "transforms_train.json") << "{ not json";
    CHECK_THROWS_AS(load_dataset(dir.string(), "train"), MalformedJsonError);
    std::ofstream(dir / "transforms_train.json") << R"({
      "camera_angle_x": 0.8,
      "frames": [{"file_path": "x", "time": 0,
        "transform_matrix": [[2,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}]})";
    CHECK_THROWS_AS(load_dataset(dir.string(), "train"), NonInvertiblePoseError);
}

TEST_CASE("opengl pose conversion looks down +z at the target") {
    // Camera at (0,0,5) looking at the origin in OpenGL convention: c2w has
    // +z pointing from target to camera.
    Mat4 c2w = Mat4::Identity();
    c2w(2, 3) = 5;
    Mat4 w2c = opengl_c2w_to_w2c(c2w);
    // The origin must land on the optical axis at depth 5 with +z forward.
    Vec4 p = w2c * Vec4(0, 0, 0, 1);
    CHECK(p[0] == doctest::Approx(0.0));
    CHECK(p[1] == doctest::Approx(0.0));
    CHECK(p[2] == doctest::Approx(5.0));
}

TEST_CASE("config parsing: values, comments, errors") {
    TrainConfig cfg = parse_config_text(
        "total_steps = 123  # comment\n"
        "lambda_ssim = 0.3\n"
        "background = 0.1, 0.2, 0.3\n"
        "static_mode = true\n"
        "\n");
    CHECK(cfg.total_steps == 123);
    CHECK(cfg.loss.lambda_ssim == doctest::Approx(0.3));
    CHECK(cfg.background[2] == doctest::Approx(0.3));
    CHECK(cfg.static_mode);
    CHECK_THROWS_AS(parse_config_text("no_such_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("total_steps = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("just a line\n"), ConfigError);
}

TEST_CASE("velocity rotor yields the requested speed to 1e-9") {
    for (int trial = 0; trial < 100; ++trial) {
        Vec3 v(oracle::uniform(-1.5, 1.5), oracle::uniform(-1.5, 1.5),
               oracle::uniform(-1.5, 1.5));
        Scalar sx = oracle::uniform(0.1, 0.4);
        Scalar st = oracle::uniform(2.0, 50.0);
        Gaussian4D g;
        g.log_scales << std::log(sx), std::log(sx), std::log(sx), std::log(st);
        g.rotor = velocity_rotor(v, sx, st);
        CHECK((gaussian_speed(g) - v).norm() <= 1e-9);
    }
}

TEST_CASE("static blob scene renders identical frames across time") {
    SyntheticSceneSpec spec;
    BlobSpec b;
    b.center = Vec3(0, 0, 0);
    b.radius = 0.3;
    b.color = Vec3(0.8, 0.4, 0.2);
    spec.blobs = {b};
    spec.cameras.count = 2;
    spec.cameras.test_count = 2;
    spec.time_samples = 4;
    spec.image_size = 32;
    SyntheticScene scene = generate_synthetic(spec);
    // One camera's frames across the 4 timestamps.
    for (int j = 1; j < 4; ++j) {
        Scalar max_diff = 0;
        for (size_t k = 0; k < scene.train.frames[0].image.data.size(); ++k)
            max_diff = std::max(max_diff, std::abs(scene.train.frames[0].image.data[k] -
                                                   scene.train.frames[j].image.data[k]));
        CHECK(max_diff <= 1e-4);
    }
}

TEST_CASE("re-rendering the ground-truth store reproduces the frames bit-exactly") {
    SyntheticSceneSpec spec = default_scene_spec();
    spec.cameras.count = 3;
    spec.cameras.test_count = 2;
    spec.time_samples = 3;
    spec.image_size = 48;
    SyntheticScene scene = generate_synthetic(spec);
    RenderOptions opts;
    opts.background = spec.background;
    for (size_t i = 0; i < scene.train.frames.size(); ++i) {
        Image img =
            render_forward(scene.ground_truth, scene.train.camera_for((int)i), opts).image;
        CHECK(img.data == scene.train.frames[i].image.data);
    }
}

TEST_CASE("flow wheel maps zero flow to white-ish center and is bounded") {
    Image flow(4, 4, 3);
    flow.at(1, 1, 0) = 2.0;
    flow.at(2, 2, 1) = -1.0;
    Image rgb = flow_to_color(flow);
    for (auto& v : rgb.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    // Zero-flow pixel: saturation 0 -> pure white.
    CHECK(rgb.at(0, 0, 0) == 1.0);
    CHECK(rgb.at(0, 0, 1) == 1.0);
    CHECK(rgb.at(0, 0, 2) == 1.0);
}

TEST_CASE("scene spec validation") {
    SyntheticSceneSpec spec = default_scene_spec();
    CHECK_NOTHROW(spec.validate());
    spec.cameras.count = 1;
    CHECK_THROWS_AS(spec.validate(), InvalidSpecError);
    spec = default_scene_spec();
    spec.blobs.clear();
    CHECK_THROWS_AS(spec.validate(), InvalidSpecError);
    spec = default_scene_spec();
    spec.blobs[0].t_start = 0.9;
    spec.blobs[0].t_end = 0.1;
    CHECK_THROWS_AS(spec.validate(), InvalidSpecError);
}

}  // TEST_SUITE
