#include "rgs/optim.hpp"

#include <algorithm>
#include <cmath>

#include "rgs/knn.hpp"
#include "rgs/sh.hpp"

namespace rgs {

namespace {

Scalar logit(Scalar p) { return std::log(p / (1 - p)); }

// Rotor coefficients mixing the time axis: b03, b13, b23, p.
constexpr int kTemporalRotorIdx[] = {3, 5, 6, 7};

void adam_scalar(Scalar& p, Scalar& m, Scalar& v, Scalar g, Scalar lr, Scalar bc1, Scalar bc2) {
    m = kAdamBeta1 * m + (1 - kAdamBeta1) * g;
    v = kAdamBeta2 * v + (1 - kAdamBeta2) * g * g;
    p -= lr * (m / bc1) / (std::sqrt(v / bc2) + kAdamEps);
}

}  // namespace

void TrainConfig::validate() const {
    auto positive = [](Scalar v) { return v > 0 && std::isfinite(v); };
    if (!positive(lr_position) || !positive(lr_position_final) || !positive(lr_scales) ||
        !positive(lr_rotor) || !positive(lr_sh_dc) || !positive(lr_sh_rest) ||
        !positive(lr_opacity))
        throw std::invalid_argument("TrainConfig: learning rates must be positive");
    if (total_steps < 0 || batch < 1) throw std::invalid_argument("TrainConfig: batch must be >= 1");
    if (densify_interval <= 0 || opacity_reset_interval <= 0 || knn_rebuild_interval <= 0 ||
        sh_unlock_interval <= 0)
        throw std::invalid_argument("TrainConfig: intervals must be positive");
    if (init_count < 1) throw std::invalid_argument("TrainConfig: init_count must be >= 1");
    if (!(box_max.array() > box_min.array()).all())
        throw std::invalid_argument("TrainConfig: init box is empty");
    if (min_gaussians < 1 || max_gaussians < min_gaussians)
        throw std::invalid_argument("TrainConfig: bad gaussian count bounds");
    if (!positive(init_time_scale) || init_opacity <= 0 || init_opacity >= 1)
        throw std::invalid_argument("TrainConfig: bad initialization constants");
}

Scalar lr_schedule(int step, int total, Scalar lr_init, Scalar lr_final) {
    if (total <= 0) return lr_init;
    Scalar u = std::clamp((Scalar)step / (Scalar)total, Scalar(0), Scalar(1));
    return lr_init * std::pow(lr_final / lr_init, u);
}

namespace {

GaussianStore finish_init(std::vector<Vec4> points, std::vector<Vec3> colors,
                          const TrainConfig& config) {
    const int n = (int)points.size();
    // 3D scale = distance to the nearest spatial neighbor (time ignored).
    std::vector<Scalar> nn_dist(n, 0);
    if (n > 1) {
        std::vector<Vec4> spatial(n);
        for (int i = 0; i < n; ++i) spatial[i] = Vec4(points[i][0], points[i][1], points[i][2], 0);
        KdTree4 tree(spatial);
        for (int i = 0; i < n; ++i) {
            auto nb = tree.knn(spatial[i], 1, i);
            nn_dist[i] = (spatial[nb[0]] - spatial[i]).norm();
        }
    } else {
        nn_dist[0] = 0.1 * (config.box_max - config.box_min).norm();
    }

    const Scalar st = config.static_mode ? kStaticTemporalScale : config.init_time_scale;
    const Scalar op_logit = logit(config.init_opacity);
    GaussianStore store;
    for (int i = 0; i < n; ++i) {
        Gaussian4D g;
        g.mean = points[i];
        Scalar s = std::max(nn_dist[i], Scalar(1e-7));
        g.log_scales = Vec4(std::log(s), std::log(s), std::log(s), std::log(st));
        g.rotor = Rotor4::identity();
        g.opacity_logit = op_logit;
        g.sh = ShCoeffs::Zero();
        if (!colors.empty()) g.sh.col(0) = (colors[i].array() - 0.5).matrix() / kShC0;
        store.push_back(g);
    }
    return store;
}

}  // namespace

GaussianStore initialize_scene(const TrainConfig& config, std::mt19937_64& rng) {
    config.validate();
    std::uniform_real_distribution<Scalar> uni(0, 1);
    std::vector<Vec4> points(config.init_count);
    for (auto& p : points) {
        for (int a = 0; a < 3; ++a)
            p[a] = config.box_min[a] + uni(rng) * (config.box_max[a] - config.box_min[a]);
        p[3] = config.static_mode ? Scalar(0.5) : uni(rng);
    }
    return finish_init(std::move(points), {}, config);
}

GaussianStore initialize_scene(const std::vector<Vec4>& points, const std::vector<Vec3>& colors,
                               const TrainConfig& config) {
    config.validate();
    if (points.empty()) throw EmptySourceError();
    if (!colors.empty() && colors.size() != points.size())
        throw std::invalid_argument("initialize_scene: colors/points size mismatch");
    return finish_init(points, colors, config);
}

void adam_step(GaussianStore& store, const StoreGrads& grads, const TrainConfig& config,
               int step) {
    if (grads.size() != store.size()) throw ShapeMismatchGradError();
    const Scalar bc1 = 1 - std::pow(kAdamBeta1, step);
    const Scalar bc2 = 1 - std::pow(kAdamBeta2, step);
    const Scalar lr_pos =
        lr_schedule(step, config.total_steps, config.lr_position, config.lr_position_final);

    for (int i = 0; i < store.size(); ++i) {
        const GaussianParamGrad& gi = grads.g[i];
        for (int a = 0; a < 4; ++a) {
            if (config.static_mode && a == 3) continue;
            adam_scalar(store.mean[i][a], store.m_mean[i][a], store.v_mean[i][a], gi.d_mean[a],
                        lr_pos, bc1, bc2);
        }
        for (int a = 0; a < (config.static_mode ? 3 : 4); ++a)
            adam_scalar(store.log_scales[i][a], store.m_ls[i][a], store.v_ls[i][a],
                        gi.d_log_scales[a], config.lr_scales, bc1, bc2);

        Vec8 rc = store.rotor[i].coeffs();
        for (int a = 0; a < 8; ++a) {
            if (config.static_mode &&
                std::find(std::begin(kTemporalRotorIdx), std::end(kTemporalRotorIdx), a) !=
                    std::end(kTemporalRotorIdx))
                continue;
            adam_scalar(rc[a], store.m_rot[i][a], store.v_rot[i][a], gi.d_rotor[a],
                        config.lr_rotor, bc1, bc2);
        }
        store.rotor[i] = normalize(Rotor4::from_coeffs(rc));
        if (config.static_mode) {
            for (int a : kTemporalRotorIdx) {
                Vec8 c = store.rotor[i].coeffs();
                c[a] = 0;
                store.rotor[i] = Rotor4::from_coeffs(c);
            }
        }

        adam_scalar(store.opacity_logit[i], store.m_op[i], store.v_op[i], gi.d_opacity_logit,
                    config.lr_opacity, bc1, bc2);

        for (int c = 0; c < 16; ++c) {
            Scalar lr = c == 0 ? config.lr_sh_dc : config.lr_sh_rest;
            for (int ch = 0; ch < 3; ++ch)
                adam_scalar(store.sh[i](ch, c), store.m_sh[i](ch, c), store.v_sh[i](ch, c),
                            gi.d_sh(ch, c), lr, bc1, bc2);
        }
    }
}

void accumulate_stats(GaussianStore& store, const StoreGrads& view_grads) {
    if (view_grads.size() != store.size()) throw ShapeMismatchGradError();
    for (int i = 0; i < store.size(); ++i) {
        if (!view_grads.visible[i]) continue;
        store.grad_accum[i] += view_grads.viewspace_norm[i];
        store.grad_count[i] += 1;
    }
}

DensifyReport densify_and_prune(GaussianStore& store, const TrainConfig& config,
                                Scalar scene_extent, std::mt19937_64& rng) {
    DensifyReport report;
    const int n = store.size();
    std::normal_distribution<Scalar> gauss(0, 1);
    std::vector<int> to_remove;

    for (int i = 0; i < n; ++i) {
        if (store.grad_count[i] == 0) continue;
        Scalar avg = store.grad_accum[i] / store.grad_count[i];
        if (avg <= config.densify_grad_threshold) continue;
        if (store.size() + 2 > config.max_gaussians) break;

        Gaussian4D parent = store.get(i);
        Scalar max_scale = parent.log_scales.head<3>().array().exp().maxCoeff();
        if (max_scale <= config.percent_dense * scene_extent) {
            // Clone, nudging the copy one temporal-scale step along its motion.
            Gaussian4D child = parent;
            Scalar st = std::exp(parent.log_scales[3]);
            child.mean.head<3>() += gaussian_speed(parent) * (gauss(rng) * st);
            store.push_back(child);
            ++report.cloned;
        } else {
            // Split into two samples of the parent's own 4D distribution
            // (time included), scales shrunk by the split factor.
            SliceCache cache;
            slice_at(parent, parent.mean[3], &cache);
            Mat4 A = cache.R * cache.q.cwiseSqrt().asDiagonal();
            for (int c = 0; c < 2; ++c) {
                Gaussian4D child = parent;
                Vec4 z;
                for (int a = 0; a < 4; ++a) z[a] = gauss(rng);
                child.mean = parent.mean + A * z;
                if (config.static_mode) child.mean[3] = parent.mean[3];
                child.log_scales.array() -= std::log(config.split_factor);
                if (config.static_mode) child.log_scales[3] = parent.log_scales[3];
                store.push_back(child);
            }
            to_remove.push_back(i);
            ++report.split;
        }
    }

    // Prune near-transparent, oversized, or over-long (in time) Gaussians.
    std::vector<int> prunable;
    for (int i = 0; i < store.size(); ++i) {
        if (std::find(to_remove.begin(), to_remove.end(), i) != to_remove.end()) continue;
        Scalar max_scale = store.log_scales[i].head<3>().array().exp().maxCoeff();
        Scalar t_scale = std::exp(store.log_scales[i][3]);
        bool over_time = !config.static_mode && t_scale > 1.0;
        if (store.opacity(i) < config.prune_opacity || max_scale > 0.5 * scene_extent || over_time)
            prunable.push_back(i);
    }
    // Keep at least min_gaussians, dropping the lowest-opacity ones first.
    int allowed = std::max(0, store.size() - (int)to_remove.size() - config.min_gaussians);
    if ((int)prunable.size() > allowed) {
        std::sort(prunable.begin(), prunable.end(),
                  [&](int a, int b) { return store.opacity(a) < store.opacity(b); });
        prunable.resize(allowed);
    }
    report.pruned = (int)prunable.size();
    to_remove.insert(to_remove.end(), prunable.begin(), prunable.end());
    std::sort(to_remove.begin(), to_remove.end());
    store.remove_indices(to_remove);
    store.reset_stats();
    return report;
}

void reset_opacity(GaussianStore& store, Scalar value) {
    for (int i = 0; i < store.size(); ++i) {
        Scalar o = std::min(store.opacity(i), value);
        store.opacity_logit[i] = logit(o);
        store.m_op[i] = 0;
        store.v_op[i] = 0;
    }
}

}  // namespace rgs
