#include "rgs/rasterizer.hpp"

#include <algorithm>
#include <cmath>

#include "rgs/parallel.hpp"

namespace rgs {
namespace {

Scalar sigmoid(Scalar x) { return 1 / (1 + std::exp(-x)); }

// 2x3 Jacobian of the pinhole projection at a camera-space point.
Eigen::Matrix<Scalar, 2, 3> projection_jacobian(const Camera& cam, const Vec3& p) {
    const Scalar z = p[2], z2 = z * z;
    Eigen::Matrix<Scalar, 2, 3> j;
    j << cam.fx / z, 0, -cam.fx * p[0] / z2,
         0, cam.fy / z, -cam.fy * p[1] / z2;
    return j;
}

struct TileGrid {
    int tiles_x, tiles_y;
};

TileGrid tile_grid(const Camera& cam) {
    return {(cam.width + kTileSize - 1) / kTileSize, (cam.height + kTileSize - 1) / kTileSize};
}

// Tile rectangle touched by a splat, clamped to the grid. Returns false
// when the footprint misses the screen entirely.
bool tile_range(const Splat2D& s, const TileGrid& g, int* x0, int* x1, int* y0, int* y1) {
    *x0 = std::max(0, (int)std::floor((s.mean2[0] - s.radius) / kTileSize));
    *x1 = std::min(g.tiles_x - 1, (int)std::floor((s.mean2[0] + s.radius) / kTileSize));
    *y0 = std::max(0, (int)std::floor((s.mean2[1] - s.radius) / kTileSize));
    *y1 = std::min(g.tiles_y - 1, (int)std::floor((s.mean2[1] + s.radius) / kTileSize));
    return *x0 <= *x1 && *y0 <= *y1;
}

// Alpha of a splat at a pixel, replicating the forward gating exactly.
// Returns false when the splat is skipped at this pixel.
bool splat_alpha(const Splat2D& s, Scalar px, Scalar py, Scalar* alpha, Scalar* raw,
                 Vec2* d_out) {
    Vec2 d(px - s.mean2[0], py - s.mean2[1]);
    Scalar power = -0.5 * (s.conic[0] * d[0] * d[0] + s.conic[2] * d[1] * d[1]) -
                   s.conic[1] * d[0] * d[1];
    if (power > 0) return false;
    Scalar r = s.alpha_base * std::exp(power);
    Scalar a = std::min(kAlphaClamp, r);
    if (a < kMinAlpha) return false;
    *alpha = a;
    *raw = r;
    if (d_out) *d_out = d;
    return true;
}

void bin_and_sort(const std::vector<Splat2D>& splats, const TileGrid& grid, int threads,
                  std::vector<std::vector<int>>* tile_splats) {
    tile_splats->assign((size_t)grid.tiles_x * grid.tiles_y, {});
    for (int i = 0; i < (int)splats.size(); ++i) {
        int x0, x1, y0, y1;
        if (!tile_range(splats[i], grid, &x0, &x1, &y0, &y1)) continue;
        for (int ty = y0; ty <= y1; ++ty)
            for (int tx = x0; tx <= x1; ++tx)
                (*tile_splats)[(size_t)ty * grid.tiles_x + tx].push_back(i);
    }
    parallel_for(0, (int)tile_splats->size(), threads, [&](int t) {
        auto& list = (*tile_splats)[t];
        std::sort(list.begin(), list.end(), [&](int a, int b) {
            if (splats[a].depth != splats[b].depth) return splats[a].depth < splats[b].depth;
            return splats[a].source_index < splats[b].source_index;  // stable tie-break
        });
    });
}

// Front-to-back blending of one tile with an arbitrary 3-vector payload.
void blend_tile(const std::vector<Splat2D>& splats, const std::vector<int>& list,
                const std::vector<Vec3>& payload, const Vec3& background, const Camera& cam,
                int tile_x, int tile_y, Image* image, std::vector<Scalar>* final_T,
                std::vector<int>* n_contrib) {
    int px0 = tile_x * kTileSize, py0 = tile_y * kTileSize;
    int px1 = std::min(px0 + kTileSize, cam.width);
    int py1 = std::min(py0 + kTileSize, cam.height);
    // Gather this tile's splats into a contiguous buffer: the depth-sorted
    // index list scatters across the full splat array, and the per-pixel
    // loop below touches every entry up to 256 times.
    struct TileSplat {
        Scalar mx, my, ca, cb, cc, alpha_base;
        Vec3 payload;
    };
    std::vector<TileSplat> local(list.size());
    for (size_t k = 0; k < list.size(); ++k) {
        const Splat2D& s = splats[list[k]];
        local[k] = {s.mean2[0], s.mean2[1], s.conic[0], s.conic[1], s.conic[2],
                    s.alpha_base, payload[list[k]]};
    }
    for (int y = py0; y < py1; ++y) {
        for (int x = px0; x < px1; ++x) {
            Scalar T = 1;
            Vec3 acc = Vec3::Zero();
            int contrib = 0;
            for (int pos = 0; pos < (int)local.size(); ++pos) {
                const TileSplat& s = local[pos];
                Scalar dx = x - s.mx, dy = y - s.my;
                Scalar power =
                    -0.5 * (s.ca * dx * dx + s.cc * dy * dy) - s.cb * dx * dy;
                if (power > 0) continue;
                Scalar a = std::min(kAlphaClamp, s.alpha_base * std::exp(power));
                if (a < kMinAlpha) continue;
                Scalar test_T = T * (1 - a);
                if (test_T < kStopTransmittance) break;
                acc += s.payload * (a * T);
                T = test_T;
                contrib = pos + 1;
            }
            acc += T * background;
            size_t pix = (size_t)y * cam.width + x;
            for (int c = 0; c < image->channels; ++c) image->at(x, y, c) = acc[c];
            if (final_T) (*final_T)[pix] = T;
            if (n_contrib) (*n_contrib)[pix] = contrib;
        }
    }
}

struct SplatGrad {
    Vec3 d_color = Vec3::Zero();
    Vec3 d_conic = Vec3::Zero();
    Vec2 d_mean2 = Vec2::Zero();
    Scalar d_alpha_base = 0;
};

// Chains one splat's screen-space gradients through projection, SH and
// slicing into the Gaussian's parameter gradients.
void project_backward(const Gaussian4D& g, const Camera& cam, const ProjectCache& pc,
                      const SplatGrad& sg, GaussianParamGrad* out) {
    // Color path: SH coefficients and view direction.
    Vec3 dL_ddir = Vec3::Zero();
    for (int ch = 0; ch < 3; ++ch) {
        if (pc.clamped[ch]) continue;
        if (sg.d_color[ch] == 0) continue;
        out->d_sh.row(ch) += sg.d_color[ch] * pc.basis.transpose();
        dL_ddir += sg.d_color[ch] * (pc.basis_grad.transpose() * g.sh.row(ch).transpose());
    }
    Vec3 dL_dmean3 = Vec3::Zero();
    if (dL_ddir != Vec3::Zero()) {
        // dir = v / |v|, v = mean3 - camera center.
        dL_dmean3 += (Mat3::Identity() - pc.dir * pc.dir.transpose()) / pc.view_dist * dL_ddir;
    }

    // alpha_base = opacity * decay.
    Scalar dL_ddecay = sg.d_alpha_base * pc.opacity;
    out->d_opacity_logit += sg.d_alpha_base * pc.decay * pc.opacity * (1 - pc.opacity);

    // conic = cov2^{-1}.
    Mat2 con = pc.cov2.inverse();
    Mat2 ghat;
    ghat << sg.d_conic[0], sg.d_conic[1] / 2, sg.d_conic[1] / 2, sg.d_conic[2];
    Mat2 H = -con * ghat * con;  // dL/dcov2

    // cov2 = T cov3 T^T + dilation.
    Mat3 dL_dcov3 = pc.T.transpose() * H * pc.T;
    Eigen::Matrix<Scalar, 2, 3> dL_dT = (H + H.transpose()) * pc.T * pc.cov3;

    // mean2 = pinhole(p_cam); its Jacobian is exactly J.
    Eigen::Matrix<Scalar, 2, 3> J = projection_jacobian(cam, pc.p_cam);
    Vec3 dL_dpcam = J.transpose() * sg.d_mean2;

    // T = J R_wc; J depends on p_cam.
    Mat3 R = cam.rotation();
    Eigen::Matrix<Scalar, 2, 3> dL_dJ = dL_dT * R.transpose();
    const Scalar z = pc.p_cam[2], z2 = z * z, z3 = z2 * z;
    const Scalar px = pc.p_cam[0], py = pc.p_cam[1];
    dL_dpcam[0] += dL_dJ(0, 2) * (-cam.fx / z2);
    dL_dpcam[1] += dL_dJ(1, 2) * (-cam.fy / z2);
    dL_dpcam[2] += dL_dJ(0, 0) * (-cam.fx / z2) + dL_dJ(0, 2) * (2 * cam.fx * px / z3) +
                   dL_dJ(1, 1) * (-cam.fy / z2) + dL_dJ(1, 2) * (2 * cam.fy * py / z3);

    dL_dmean3 += R.transpose() * dL_dpcam;

    slice_backward(g, pc.slice, dL_dcov3, dL_dmean3, dL_ddecay, Vec3::Zero(), out);
}

// Slice + project every visible Gaussian, in index order.
void build_splats(const GaussianStore& store, const Camera& cam, int threads, bool retain,
                  std::vector<Splat2D>* splats, std::vector<ProjectCache>* caches) {
    int n = store.size();
    std::vector<std::optional<Splat2D>> tmp(n);
    std::vector<ProjectCache> tmp_cache(retain ? n : 0);
    parallel_for(0, n, threads, [&](int i) {
        Gaussian4D g = store.get(i);
        SlicedGaussian3D sliced;
        ProjectCache local;
        ProjectCache* pc = retain ? &tmp_cache[i] : &local;
        try {
            sliced = slice_at(g, cam.time, &pc->slice);
        } catch (const DegenerateTimeError&) {
            return;  // temporal scale collapsed; skip for this view
        }
        Scalar dt = cam.time - g.mean[3];
        if (sliced.lambda * dt * dt > kVisibilityThreshold) return;
        auto s = project(sliced, cam, g.sh, store.active_sh_degree, g.opacity_logit, pc);
        if (!s) return;
        s->source_index = i;
        tmp[i] = *s;
    });
    for (int i = 0; i < n; ++i) {
        if (!tmp[i]) continue;
        splats->push_back(*tmp[i]);
        if (retain) caches->push_back(tmp_cache[i]);
    }
}

}  // namespace

std::optional<Splat2D> project(const SlicedGaussian3D& s, const Camera& cam,
                               const ShCoeffs& sh, int sh_degree, Scalar opacity_logit,
                               ProjectCache* cache) {
    Vec3 p_cam = cam.rotation() * s.mean + cam.translation();
    if (p_cam[2] <= kNearPlane) return std::nullopt;

    Splat2D out;
    out.depth = p_cam[2];
    out.mean2 = Vec2(cam.fx * p_cam[0] / p_cam[2] + cam.cx,
                     cam.fy * p_cam[1] / p_cam[2] + cam.cy);

    Eigen::Matrix<Scalar, 2, 3> J = projection_jacobian(cam, p_cam);
    Eigen::Matrix<Scalar, 2, 3> T = J * cam.rotation();
    Mat2 cov2 = T * s.cov * T.transpose() + kCovDilation * Mat2::Identity();
    Scalar det = cov2.determinant();
    if (det <= 0) return std::nullopt;
    Mat2 con = cov2.inverse();
    out.conic = Vec3(con(0, 0), con(0, 1), con(1, 1));

    Scalar mid = 0.5 * (cov2(0, 0) + cov2(1, 1));
    Scalar max_eig = mid + std::sqrt(std::max(Scalar(0.01), mid * mid - det));
    out.radius = 3 * std::sqrt(max_eig);
    if (out.mean2[0] + out.radius < 0 || out.mean2[0] - out.radius > cam.width - 1 ||
        out.mean2[1] + out.radius < 0 || out.mean2[1] - out.radius > cam.height - 1)
        return std::nullopt;

    Scalar opacity = sigmoid(opacity_logit);
    out.alpha_base = opacity * s.decay;
    if (out.alpha_base < kMinAlpha) return std::nullopt;

    Vec3 v = s.mean - cam.center();
    Scalar dist = v.norm();
    Vec3 dir = dist > 0 ? Vec3(v / dist) : Vec3::UnitZ();
    ShBasis basis;
    ShBasisGrad basis_grad;
    sh_basis(dir, sh_degree, &basis, cache ? &basis_grad : nullptr);
    Vec3 color = sh * basis + Vec3::Constant(0.5);
    bool clamped[3];
    for (int ch = 0; ch < 3; ++ch) {
        clamped[ch] = color[ch] < 0;
        if (clamped[ch]) color[ch] = 0;
    }
    out.color = color;
    out.flow2 = T * s.speed;

    if (cache) {
        cache->cov3 = s.cov;
        cache->mean3 = s.mean;
        cache->speed = s.speed;
        cache->decay = s.decay;
        cache->p_cam = p_cam;
        cache->T = T;
        cache->cov2 = cov2;
        cache->dir = dir;
        cache->view_dist = dist;
        cache->basis = basis;
        cache->basis_grad = basis_grad;
        for (int ch = 0; ch < 3; ++ch) cache->clamped[ch] = clamped[ch];
        cache->opacity = opacity;
    }
    return out;
}

void rasterize_forward(const std::vector<Splat2D>& splats, const Camera& cam,
                       const Vec3& background, int threads, Image* image,
                       RenderRecords* records) {
    TileGrid grid = tile_grid(cam);
    std::vector<std::vector<int>> tiles;
    bin_and_sort(splats, grid, threads, &tiles);

    *image = Image(cam.width, cam.height, 3);
    std::vector<Vec3> payload(splats.size());
    for (size_t i = 0; i < splats.size(); ++i) payload[i] = splats[i].color;

    std::vector<Scalar>* final_T = nullptr;
    std::vector<int>* n_contrib = nullptr;
    if (records) {
        records->tiles_x = grid.tiles_x;
        records->tiles_y = grid.tiles_y;
        records->background = background;
        records->final_T.assign((size_t)cam.width * cam.height, 1);
        records->n_contrib.assign((size_t)cam.width * cam.height, 0);
        final_T = &records->final_T;
        n_contrib = &records->n_contrib;
    }

    parallel_for(0, grid.tiles_x * grid.tiles_y, threads, [&](int t) {
        blend_tile(splats, tiles[t], payload, background, cam, t % grid.tiles_x,
                   t / grid.tiles_x, image, final_T, n_contrib);
    });
    if (records) records->tile_splats = std::move(tiles);
}

RenderOutput render_forward(const GaussianStore& store, const Camera& cam,
                            const RenderOptions& opts) {
    cam.validate();
    RenderOutput out;
    build_splats(store, cam, opts.threads, opts.retain_records, &out.records.splats,
                 &out.records.caches);
    rasterize_forward(out.records.splats, cam, opts.background, opts.threads, &out.image,
                      &out.records);
    out.records.retained = opts.retain_records;
    return out;
}

StoreGrads render_backward(const GaussianStore& store, const Camera& cam,
                           const RenderRecords& rec, const Image& dL_dimage, int threads) {
    if (!rec.retained) throw MissingRecordsError();
    const auto& splats = rec.splats;
    int num_tiles = rec.tiles_x * rec.tiles_y;

    // Per-tile gradient buffers, reduced in fixed tile order afterwards so
    // the result does not depend on the worker count.
    std::vector<std::vector<SplatGrad>> tile_grads(num_tiles);
    parallel_for(0, num_tiles, threads, [&](int t) {
        const auto& list = rec.tile_splats[t];
        if (list.empty()) return;
        auto& grads = tile_grads[t];
        grads.assign(list.size(), SplatGrad{});
        int tile_x = t % rec.tiles_x, tile_y = t / rec.tiles_x;
        int px0 = tile_x * kTileSize, py0 = tile_y * kTileSize;
        int px1 = std::min(px0 + kTileSize, cam.width);
        int py1 = std::min(py0 + kTileSize, cam.height);
        for (int y = py0; y < py1; ++y) {
            for (int x = px0; x < px1; ++x) {
                size_t pix = (size_t)y * cam.width + x;
                int contrib = rec.n_contrib[pix];
                if (contrib == 0) continue;
                Vec3 dLdC(dL_dimage.at(x, y, 0), dL_dimage.at(x, y, 1), dL_dimage.at(x, y, 2));
                Scalar T_run = rec.final_T[pix];
                Vec3 suffix = rec.background * rec.final_T[pix];
                for (int pos = contrib - 1; pos >= 0; --pos) {
                    const Splat2D& s = splats[list[pos]];
                    Scalar a, raw;
                    Vec2 d;
                    if (!splat_alpha(s, (Scalar)x, (Scalar)y, &a, &raw, &d)) continue;
                    Scalar T_before = T_run / (1 - a);
                    Scalar w = a * T_before;
                    SplatGrad& sg = grads[pos];
                    sg.d_color += w * dLdC;
                    Scalar dL_da = dLdC.dot(s.color * T_before - suffix / (1 - a));
                    if (raw <= kAlphaClamp) {  // clamped alpha has zero derivative
                        sg.d_alpha_base += dL_da * (a / s.alpha_base);
                        Scalar dL_dpower = dL_da * a;
                        sg.d_conic += dL_dpower *
                                      Vec3(-0.5 * d[0] * d[0], -d[0] * d[1], -0.5 * d[1] * d[1]);
                        Vec2 cd(s.conic[0] * d[0] + s.conic[1] * d[1],
                                s.conic[1] * d[0] + s.conic[2] * d[1]);
                        sg.d_mean2 += dL_dpower * cd;
                    }
                    suffix += s.color * w;
                    T_run = T_before;
                }
            }
        }
    });

    // Fixed-order reduction into per-splat gradients.
    std::vector<SplatGrad> splat_grads(splats.size());
    for (int t = 0; t < num_tiles; ++t) {
        const auto& list = rec.tile_splats[t];
        for (size_t k = 0; k < tile_grads[t].size(); ++k) {
            SplatGrad& dst = splat_grads[list[k]];
            const SplatGrad& src = tile_grads[t][k];
            dst.d_color += src.d_color;
            dst.d_conic += src.d_conic;
            dst.d_mean2 += src.d_mean2;
            dst.d_alpha_base += src.d_alpha_base;
        }
    }

    StoreGrads out;
    out.resize(store.size());
    // One splat per Gaussian per view, so writes to out.g are disjoint.
    parallel_for(0, (int)splats.size(), threads, [&](int i) {
        int src = splats[i].source_index;
        Gaussian4D g = store.get(src);
        project_backward(g, cam, rec.caches[i], splat_grads[i], &out.g[src]);
        out.viewspace_norm[src] = splat_grads[i].d_mean2.norm();
        out.visible[src] = 1;
    });
    return out;
}

Image render_flow(const GaussianStore& store, const Camera& cam, int threads) {
    cam.validate();
    std::vector<Splat2D> splats;
    std::vector<ProjectCache> caches;
    build_splats(store, cam, threads, false, &splats, &caches);

    TileGrid grid = tile_grid(cam);
    std::vector<std::vector<int>> tiles;
    bin_and_sort(splats, grid, threads, &tiles);

    Image rgb(cam.width, cam.height, 3);
    std::vector<Vec3> payload(splats.size());
    for (size_t i = 0; i < splats.size(); ++i)
        payload[i] = Vec3(splats[i].flow2[0], splats[i].flow2[1], 0);
    parallel_for(0, grid.tiles_x * grid.tiles_y, threads, [&](int t) {
        blend_tile(splats, tiles[t], payload, Vec3::Zero(), cam, t % grid.tiles_x,
                   t / grid.tiles_x, &rgb, nullptr, nullptr);
    });

    Image flow(cam.width, cam.height, 2);
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x) {
            flow.at(x, y, 0) = rgb.at(x, y, 0);
            flow.at(x, y, 1) = rgb.at(x, y, 1);
        }
    return flow;
}

}  // namespace rgs
