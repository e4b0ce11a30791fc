#include "rgs/gaussian.hpp"

#include <cmath>

namespace rgs {
namespace {

// Fills R, q, sigma blocks of the cache from the raw parameters.
void assemble_cache(const Gaussian4D& g, SliceCache* c) {
    c->normalized = normalize(g.rotor);
    c->R = to_matrix(c->normalized);
    for (int k = 0; k < 4; ++k) c->q[k] = std::exp(2 * g.log_scales[k]);
    Mat4 sigma = c->R * c->q.asDiagonal() * c->R.transpose();
    c->U = sigma.topLeftCorner<3, 3>();
    c->V = sigma.topRightCorner<3, 1>();
    c->W = sigma(3, 3);
}

}  // namespace

Mat4 assemble_covariance(const Gaussian4D& g) {
    SliceCache c;
    assemble_cache(g, &c);
    Mat4 sigma;
    sigma.topLeftCorner<3, 3>() = c.U;
    sigma.topRightCorner<3, 1>() = c.V;
    sigma.bottomLeftCorner<1, 3>() = c.V.transpose();
    sigma(3, 3) = c.W;
    return sigma;
}

SlicedGaussian3D slice_at(const Gaussian4D& g, Scalar t, SliceCache* cache) {
    SliceCache local;
    SliceCache* c = cache ? cache : &local;
    assemble_cache(g, c);
    if (c->W < kTemporalFloor) throw DegenerateTimeError();
    c->dt = t - g.mean[3];

    SlicedGaussian3D out;
    out.lambda = 1 / c->W;
    out.speed = c->V / c->W;
    out.cov = c->U - (c->V * c->V.transpose()) / c->W + kCov3Epsilon * Mat3::Identity();
    out.mean = g.mean.head<3>() + c->dt * out.speed;
    out.decay = std::exp(-0.5 * out.lambda * c->dt * c->dt);
    c->decay = out.decay;
    return out;
}

bool is_visible(const Gaussian4D& g, Scalar t) {
    SliceCache c;
    assemble_cache(g, &c);
    if (c.W < kTemporalFloor) return false;
    Scalar dt = t - g.mean[3];
    return dt * dt / c.W <= kVisibilityThreshold;
}

void slice_backward(const Gaussian4D& g, const SliceCache& c, const Mat3& dL_dcov3,
                    const Vec3& dL_dmean3, Scalar dL_ddecay, const Vec3& dL_dspeed,
                    GaussianParamGrad* out) {
    const Scalar W = c.W;
    const Scalar lambda = 1 / W;
    const Vec3 speed = c.V / W;

    // Temporal decay.
    Scalar dL_dlambda = dL_ddecay * (-0.5 * c.dt * c.dt) * c.decay;
    out->d_mean[3] += dL_ddecay * lambda * c.dt * c.decay;

    // Sliced mean mu(t) = mu_xyz + dt * V / W.
    out->d_mean.head<3>() += dL_dmean3;
    out->d_mean[3] += -speed.dot(dL_dmean3);

    Vec3 dL_dV = (c.dt / W) * dL_dmean3 + dL_dspeed / W;
    Scalar dL_dW = -(c.dt * c.V.dot(dL_dmean3) + c.V.dot(dL_dspeed)) / (W * W);

    // cov3 = U - V V^T / W (independent entries).
    const Mat3& Gc = dL_dcov3;
    dL_dV += -((Gc + Gc.transpose()) * c.V) / W;
    dL_dW += c.V.dot(Gc * c.V) / (W * W);
    dL_dW += -dL_dlambda / (W * W);

    // Assemble the 4x4 covariance gradient; V is read from the last column
    // and W from (3,3) only.
    Mat4 G4 = Mat4::Zero();
    G4.topLeftCorner<3, 3>() = Gc;
    G4.topRightCorner<3, 1>() = dL_dV;
    G4(3, 3) = dL_dW;

    // sigma = R diag(q) R^T.
    Mat4 RtGR = c.R.transpose() * G4 * c.R;
    for (int k = 0; k < 4; ++k)
        out->d_log_scales[k] += 2 * c.q[k] * RtGR(k, k);

    Mat4 dL_dR = (G4 + G4.transpose()) * c.R * c.q.asDiagonal();
    RotorJacobian mj = to_matrix_jacobian(c.normalized);
    Vec8 dL_drn = Vec8::Zero();
    for (int e = 0; e < 16; ++e) {
        Scalar w = dL_dR(e / 4, e % 4);
        if (w != 0) dL_drn += w * mj.row(e).transpose();
    }
    out->d_rotor += normalize_jacobian(g.rotor).transpose() * dL_drn;
}

Vec3 gaussian_speed(const Gaussian4D& g, SliceCache* cache) {
    SliceCache local;
    SliceCache* c = cache ? cache : &local;
    assemble_cache(g, c);
    if (c->W < kTemporalFloor) throw DegenerateTimeError();
    c->dt = 0;
    return c->V / c->W;
}

Gaussian4D GaussianStore::get(int i) const {
    Gaussian4D g;
    g.mean = mean[i];
    g.log_scales = log_scales[i];
    g.rotor = rotor[i];
    g.opacity_logit = opacity_logit[i];
    g.sh = sh[i];
    return g;
}

void GaussianStore::push_back(const Gaussian4D& g) {
    mean.push_back(g.mean);
    log_scales.push_back(g.log_scales);
    rotor.push_back(g.rotor);
    opacity_logit.push_back(g.opacity_logit);
    sh.push_back(g.sh);
    m_mean.push_back(Vec4::Zero());
    v_mean.push_back(Vec4::Zero());
    m_ls.push_back(Vec4::Zero());
    v_ls.push_back(Vec4::Zero());
    m_rot.push_back(Vec8::Zero());
    v_rot.push_back(Vec8::Zero());
    m_op.push_back(0);
    v_op.push_back(0);
    m_sh.push_back(ShCoeffs::Zero());
    v_sh.push_back(ShCoeffs::Zero());
    grad_accum.push_back(0);
    grad_count.push_back(0);
}

void GaussianStore::remove_indices(const std::vector<int>& sorted_indices) {
    if (sorted_indices.empty()) return;
    int n = size();
    std::vector<char> drop(n, 0);
    for (int i : sorted_indices) drop[i] = 1;
    int w = 0;
    for (int i = 0; i < n; ++i) {
        if (drop[i]) continue;
        if (w != i) {
            mean[w] = mean[i];
            log_scales[w] = log_scales[i];
            rotor[w] = rotor[i];
            opacity_logit[w] = opacity_logit[i];
            sh[w] = sh[i];
            m_mean[w] = m_mean[i];
            v_mean[w] = v_mean[i];
            m_ls[w] = m_ls[i];
            v_ls[w] = v_ls[i];
            m_rot[w] = m_rot[i];
            v_rot[w] = v_rot[i];
            m_op[w] = m_op[i];
            v_op[w] = v_op[i];
            m_sh[w] = m_sh[i];
            v_sh[w] = v_sh[i];
            grad_accum[w] = grad_accum[i];
            grad_count[w] = grad_count[i];
        }
        ++w;
    }
    mean.resize(w);
    log_scales.resize(w);
    rotor.resize(w);
    opacity_logit.resize(w);
    sh.resize(w);
    m_mean.resize(w);
    v_mean.resize(w);
    m_ls.resize(w);
    v_ls.resize(w);
    m_rot.resize(w);
    v_rot.resize(w);
    m_op.resize(w);
    v_op.resize(w);
    m_sh.resize(w);
    v_sh.resize(w);
    grad_accum.resize(w);
    grad_count.resize(w);
}

void GaussianStore::reset_stats() {
    std::fill(grad_accum.begin(), grad_accum.end(), 0.0);
    std::fill(grad_count.begin(), grad_count.end(), 0);
}

Scalar GaussianStore::opacity(int i) const {
    return 1 / (1 + std::exp(-opacity_logit[i]));
}

void StoreGrads::add(const StoreGrads& other) {
    for (int i = 0; i < size(); ++i) {
        g[i].d_mean += other.g[i].d_mean;
        g[i].d_log_scales += other.g[i].d_log_scales;
        g[i].d_rotor += other.g[i].d_rotor;
        g[i].d_opacity_logit += other.g[i].d_opacity_logit;
        g[i].d_sh += other.g[i].d_sh;
        viewspace_norm[i] += other.viewspace_norm[i];
        visible[i] |= other.visible[i];
    }
}

void StoreGrads::scale(Scalar f) {
    for (auto& gi : g) {
        gi.d_mean *= f;
        gi.d_log_scales *= f;
        gi.d_rotor *= f;
        gi.d_opacity_logit *= f;
        gi.d_sh *= f;
    }
}

}  // namespace rgs
