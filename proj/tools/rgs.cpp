#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "rgs/checkpoint.hpp"
#include "rgs/config.hpp"
#include "rgs/dataset.hpp"
#include "rgs/parallel.hpp"
#include "rgs/png_io.hpp"
#include "rgs/rasterizer.hpp"
#include "rgs/ssim.hpp"
#include "rgs/synthetic.hpp"
#include "rgs/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

rgs::Camera load_camera_json(const std::string& path, rgs::Scalar time) {
    std::ifstream in(path);
    if (!in) throw rgs::MissingFileError(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw rgs::MalformedJsonError(e.what());
    }
    rgs::Camera cam;
    cam.width = j.value("width", 128);
    cam.height = j.value("height", 128);
    rgs::Scalar angle = j.at("camera_angle_x").get<rgs::Scalar>();
    cam.fx = cam.fy = 0.5 * cam.width / std::tan(angle / 2);
    cam.cx = cam.width / 2.0;
    cam.cy = cam.height / 2.0;
    rgs::Mat4 c2w;
    const auto& m = j.at("transform_matrix");
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) c2w(r, c) = m.at(r).at(c).get<rgs::Scalar>();
    cam.world_to_camera = rgs::opengl_c2w_to_w2c(c2w);
    cam.time = time;
    return cam;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
    rgs::SyntheticSceneSpec spec =
        spec_path == "default" ? rgs::default_scene_spec() : rgs::parse_scene_spec(spec_path);
    rgs::SyntheticScene scene = rgs::generate_synthetic(spec, rgs::default_threads());
    rgs::save_dataset(out_dir, scene.train);
    rgs::save_dataset(out_dir, scene.test);
    rgs::save_checkpoint((fs::path(out_dir) / "ground_truth.r4gs").string(), scene.ground_truth);
    std::cout << "wrote " << scene.train.frames.size() << " train + " << scene.test.frames.size()
              << " test frames and " << scene.ground_truth.size() << " ground-truth gaussians to "
              << out_dir << "\n";
    return 0;
}

int cmd_train(const std::string& data_dir, const std::string& config_path,
              const std::string& out_ckpt, bool static_mode) {
    rgs::TrainConfig cfg =
        config_path.empty() ? rgs::TrainConfig{} : rgs::parse_config_file(config_path);
    if (static_mode) cfg.static_mode = true;
    rgs::Dataset ds = rgs::load_dataset(data_dir, "train", true, rgs::default_threads());

    std::ofstream metrics(out_ckpt + ".metrics.jsonl");
    rgs::TrainResult result = rgs::train(ds, cfg, &metrics);
    rgs::save_checkpoint(out_ckpt, result.store);
    if (!result.metrics.empty()) {
        const auto& m = result.metrics.back();
        std::cout << "final step " << m.step << ": loss " << m.total << ", train psnr " << m.psnr
                  << " dB, " << m.count << " gaussians\n";
    }
    std::cout << "saved " << out_ckpt << "\n";
    return 0;
}

int cmd_render(const std::string& ckpt, const std::string& camera_json, double time,
               const std::string& out_png) {
    rgs::GaussianStore store = rgs::load_checkpoint(ckpt);
    rgs::Camera cam = load_camera_json(camera_json, time);
    rgs::RenderOptions opts;
    opts.threads = rgs::default_threads();
    rgs::Image img = rgs::render_forward(store, cam, opts).image;
    rgs::save_png(out_png, img);
    std::cout << "wrote " << out_png << "\n";
    return 0;
}

int cmd_eval(const std::string& ckpt, const std::string& data_dir, const std::string& split) {
    rgs::GaussianStore store = rgs::load_checkpoint(ckpt);
    rgs::Dataset ds = rgs::load_dataset(data_dir, split, true, rgs::default_threads());
    rgs::RenderOptions opts;
    opts.threads = rgs::default_threads();

    double sum_psnr = 0, sum_ssim = 0;
    std::cout << std::setprecision(6);
    std::cout << "frame  psnr(dB)  ssim\n";
    for (size_t i = 0; i < ds.frames.size(); ++i) {
        rgs::Image img = rgs::render_forward(store, ds.camera_for((int)i), opts).image;
        double p = rgs::psnr(img, ds.frames[i].image);
        double s = 1 - rgs::ssim_loss(img, ds.frames[i].image);
        sum_psnr += p;
        sum_ssim += s;
        std::cout << ds.frames[i].file_path << "  " << p << "  " << s << "\n";
    }
    std::cout << "mean  " << sum_psnr / ds.frames.size() << "  " << sum_ssim / ds.frames.size()
              << "\n";
    return 0;
}

int cmd_flow(const std::string& ckpt, const std::string& camera_json, double time,
             const std::string& out_png, const std::string& out_raw) {
    rgs::GaussianStore store = rgs::load_checkpoint(ckpt);
    rgs::Camera cam = load_camera_json(camera_json, time);
    rgs::Image flow = rgs::render_flow(store, cam, rgs::default_threads());
    rgs::save_png(out_png, rgs::flow_to_color(flow));
    if (!out_raw.empty()) {
        // PFM holds 1 or 3 channels; store (u, v, 0).
        rgs::Image raw(flow.width, flow.height, 3);
        for (int y = 0; y < flow.height; ++y)
            for (int x = 0; x < flow.width; ++x) {
                raw.at(x, y, 0) = flow.at(x, y, 0);
                raw.at(x, y, 1) = flow.at(x, y, 1);
            }
        rgs::save_pfm(out_raw, raw);
    }
    std::cout << "wrote " << out_png << "\n";
    return 0;
}

int cmd_slice_debug(const std::string& ckpt, int index, double time) {
    rgs::GaussianStore store = rgs::load_checkpoint(ckpt);
    if (index < 0 || index >= store.size()) {
        std::cerr << "index " << index << " out of range [0, " << store.size() << ")\n";
        return 1;
    }
    rgs::SlicedGaussian3D s = rgs::slice_at(store.get(index), time);
    std::cout << std::setprecision(6);
    std::cout << "gaussian " << index << " at t = " << time << "\n";
    std::cout << "lambda: " << s.lambda << "\n";
    std::cout << "decay: " << s.decay << "\n";
    std::cout << "mean: " << s.mean.transpose() << "\n";
    std::cout << "speed: " << s.speed.transpose() << "\n";
    std::cout << "cov3:\n" << s.cov << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"4D rotor Gaussian splatting toolkit"};
    app.require_subcommand(1);

    std::string spec_path, out_dir;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth->add_option("spec", spec_path, "Scene spec JSON, or 'default'")->required();
    synth->add_option("out_dir", out_dir, "Output directory")->required();

    std::string data_dir, config_path, out_ckpt;
    bool static_mode = false;
    auto* train = app.add_subcommand("train", "Train on a dataset");
    train->add_option("data_dir", data_dir, "Dataset directory")->required();
    train->add_option("--config", config_path, "key = value config file");
    train->add_option("--out", out_ckpt, "Output checkpoint")->required();
    train->add_flag("--static-mode", static_mode, "Freeze all temporal parameters");

    std::string ckpt, camera_json, out_png, out_raw, split = "test";
    double time = 0;
    int index = 0;
    auto* render = app.add_subcommand("render", "Render one view from a checkpoint");
    render->add_option("ckpt", ckpt, "Checkpoint")->required();
    render->add_option("--camera", camera_json, "Camera JSON")->required();
    render->add_option("--time", time, "Scene time in [0, 1]");
    render->add_option("--out", out_png, "Output PNG")->required();

    auto* eval = app.add_subcommand("eval", "PSNR/SSIM against a dataset split");
    eval->add_option("ckpt", ckpt, "Checkpoint")->required();
    eval->add_option("data_dir", data_dir, "Dataset directory")->required();
    eval->add_option("--split", split, "Dataset split (default test)");

    auto* flow = app.add_subcommand("flow", "Render optical flow");
    flow->add_option("ckpt", ckpt, "Checkpoint")->required();
    flow->add_option("--camera", camera_json, "Camera JSON")->required();
    flow->add_option("--time", time, "Scene time in [0, 1]");
    flow->add_option("--out", out_png, "Output PNG (flow wheel)")->required();
    flow->add_option("--raw", out_raw, "Also dump raw float flow (PFM)");

    auto* slice = app.add_subcommand("slice-debug", "Print one Gaussian's slice at a time");
    slice->add_option("ckpt", ckpt, "Checkpoint")->required();
    slice->add_option("--index", index, "Gaussian index")->required();
    slice->add_option("--time", time, "Scene time in [0, 1]");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synth(spec_path, out_dir);
        if (train->parsed()) return cmd_train(data_dir, config_path, out_ckpt, static_mode);
        if (render->parsed()) return cmd_render(ckpt, camera_json, time, out_png);
        if (eval->parsed()) return cmd_eval(ckpt, data_dir, split);
        if (flow->parsed()) return cmd_flow(ckpt, camera_json, time, out_png, out_raw);
        if (slice->parsed()) return cmd_slice_debug(ckpt, index, time);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
