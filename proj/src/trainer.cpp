#include "rgs/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rgs/parallel.hpp"
#include "rgs/ssim.hpp"

namespace rgs {

Vec4 scene_scales(const GaussianStore& store) {
    Vec4 lo = store.mean.empty() ? Vec4::Zero() : store.mean[0];
    Vec4 hi = lo;
    for (const auto& m : store.mean) {
        lo = lo.cwiseMin(m);
        hi = hi.cwiseMax(m);
    }
    return (hi - lo).cwiseMax(1e-3);
}

LossBreakdown evaluate_loss(const GaussianStore& store, const std::vector<TrainFrame>& frames,
                            const LossWeights& weights, const Vec3& background,
                            const Knn4DIndex* knn, int threads, StoreGrads* grads) {
    LossBreakdown out;
    if (grads) grads->resize(store.size());

    RenderOptions opts;
    opts.background = background;
    opts.threads = threads;
    opts.retain_records = grads != nullptr;

    const Scalar inv_b = frames.empty() ? 0 : 1 / (Scalar)frames.size();
    for (const auto& frame : frames) {
        RenderOutput ro = render_forward(store, frame.cam, opts);
        if (!grads) {
            out.l1 += l1_loss(ro.image, *frame.target) * inv_b;
            out.ssim += ssim_loss(ro.image, *frame.target) * inv_b;
            continue;
        }
        Image g_l1 = l1_loss_backward(ro.image, *frame.target);
        out.l1 += l1_loss(ro.image, *frame.target) * inv_b;
        Image g_ssim;
        out.ssim += ssim_loss_with_grad(ro.image, *frame.target, &g_ssim) * inv_b;

        Image dL_dimage(ro.image.width, ro.image.height, ro.image.channels);
        const Scalar wl1 = (1 - weights.lambda_ssim) * inv_b;
        const Scalar wss = weights.lambda_ssim * inv_b;
        for (size_t i = 0; i < dL_dimage.data.size(); ++i)
            dL_dimage.data[i] = wl1 * g_l1.data[i] + wss * g_ssim.data[i];

        StoreGrads frame_grads = render_backward(store, frame.cam, ro.records, dL_dimage, threads);
        grads->add(frame_grads);
    }

    if (weights.lambda_entropy != 0) {
        std::vector<Scalar> opacities(store.size());
        for (int i = 0; i < store.size(); ++i) opacities[i] = store.opacity(i);
        std::vector<Scalar> g_op;
        out.entropy = entropy_loss_with_grad(opacities, grads ? &g_op : nullptr);
        if (grads)
            for (int i = 0; i < store.size(); ++i)
                grads->g[i].d_opacity_logit +=
                    weights.lambda_entropy * g_op[i] * opacities[i] * (1 - opacities[i]);
    }

    if (weights.lambda_consistency != 0 && knn != nullptr && store.size() > 0) {
        std::vector<Vec3> speeds(store.size());
        std::vector<SliceCache> caches(store.size());
        for (int i = 0; i < store.size(); ++i)
            speeds[i] = gaussian_speed(store.get(i), &caches[i]);
        std::vector<Vec3> g_speed;
        out.consistency = consistency_loss(speeds, *knn, grads ? &g_speed : nullptr);
        if (grads)
            for (int i = 0; i < store.size(); ++i)
                slice_backward(store.get(i), caches[i], Mat3::Zero(), Vec3::Zero(), 0,
                               weights.lambda_consistency * g_speed[i], &grads->g[i]);
    }

    out.total = combine_losses(weights, out.l1, out.ssim, out.entropy, out.consistency);
    return out;
}

namespace {

Scalar camera_extent(const Dataset& ds) {
    std::vector<Vec3> centers;
    centers.reserve(ds.frames.size());
    for (size_t i = 0; i < ds.frames.size(); ++i)
        centers.push_back(ds.camera_for((int)i).center());
    Vec3 mean = Vec3::Zero();
    for (const auto& c : centers) mean += c;
    mean /= (Scalar)centers.size();
    Scalar r = 0;
    for (const auto& c : centers) r = std::max(r, (c - mean).norm());
    return std::max(r, Scalar(1e-3));
}

void log_metrics(std::ostream* out, const StepMetrics& m) {
    if (!out) return;
    (*out) << "{\"step\":" << m.step << ",\"total\":" << m.total << ",\"l1\":" << m.l1
           << ",\"ssim\":" << m.ssim << ",\"entropy\":" << m.entropy
           << ",\"consistency\":" << m.consistency << ",\"psnr\":" << m.psnr
           << ",\"count\":" << m.count << "}\n";
}

}  // namespace

TrainResult train_from(GaussianStore store, const Dataset& dataset, const TrainConfig& config,
                       std::ostream* metrics_out) {
    config.validate();
    if (dataset.frames.empty()) throw std::invalid_argument("train: empty dataset");
    const int threads = config.threads > 0 ? config.threads : default_threads();
    const Scalar extent = camera_extent(dataset);

    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<int> pick(0, (int)dataset.frames.size() - 1);

    // Cameras are fixed per frame; build them once.
    std::vector<Camera> cams(dataset.frames.size());
    for (size_t i = 0; i < cams.size(); ++i) cams[i] = dataset.camera_for((int)i);

    TrainResult result;
    Knn4DIndex knn;
    bool knn_valid = false;
    auto rebuild_knn = [&]() {
        knn_valid = config.loss.lambda_consistency != 0 &&
                    store.size() > config.loss.k_neighbors;
        if (knn_valid)
            knn = build_knn4d(store, config.loss.k_neighbors, scene_scales(store), threads);
    };
    rebuild_knn();

    for (int step = 1; step <= config.total_steps; ++step) {
        store.active_sh_degree = std::min(3, (step - 1) / config.sh_unlock_interval);

        std::vector<TrainFrame> batch(config.batch);
        for (auto& f : batch) {
            int idx = pick(rng);
            f.cam = cams[idx];
            f.target = &dataset.frames[idx].image;
        }

        StoreGrads grads;
        LossBreakdown loss = evaluate_loss(store, batch, config.loss, config.background,
                                           knn_valid ? &knn : nullptr, threads, &grads);
        if (!std::isfinite(loss.total))
            throw std::runtime_error("train: non-finite loss at step " + std::to_string(step) +
                                     " (l1=" + std::to_string(loss.l1) +
                                     ", ssim=" + std::to_string(loss.ssim) + ")");

        accumulate_stats(store, grads);
        adam_step(store, grads, config, step);

        bool mutated = false;
        if (step >= config.densify_from && step <= config.densify_until &&
            step % config.densify_interval == 0) {
            densify_and_prune(store, config, extent, rng);
            mutated = true;
        }
        if (step % config.opacity_reset_interval == 0) {
            reset_opacity(store, config.reset_opacity_value);
        }
        if (mutated || step % config.knn_rebuild_interval == 0) rebuild_knn();

        if (step % config.log_interval == 0 || step == config.total_steps) {
            StepMetrics m;
            m.step = step;
            m.total = loss.total;
            m.l1 = loss.l1;
            m.ssim = loss.ssim;
            m.entropy = loss.entropy;
            m.consistency = loss.consistency;
            m.count = store.size();
            RenderOptions opts;
            opts.background = config.background;
            opts.threads = threads;
            m.psnr = psnr(render_forward(store, batch[0].cam, opts).image, *batch[0].target);
            log_metrics(metrics_out, m);
            result.metrics.push_back(m);
        }
    }
    result.store = std::move(store);
    return result;
}

TrainResult train(const Dataset& dataset, const TrainConfig& config, std::ostream* metrics_out) {
    config.validate();
    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);
    GaussianStore store = initialize_scene(config, rng);
    return train_from(std::move(store), dataset, config, metrics_out);
}

}  // namespace rgs
