#include "rgs/ssim.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace rgs {
namespace {

constexpr int kWin = 11;
constexpr Scalar kSigma = 1.5;
constexpr Scalar kC1 = 0.01 * 0.01;
constexpr Scalar kC2 = 0.03 * 0.03;

const std::array<Scalar, kWin>& window() {
    static const auto w = [] {
        std::array<Scalar, kWin> k{};
        Scalar sum = 0;
        for (int i = 0; i < kWin; ++i) {
            Scalar d = i - (kWin - 1) / 2.0;
            k[i] = std::exp(-d * d / (2 * kSigma * kSigma));
            sum += k[i];
        }
        for (auto& v : k) v /= sum;
        return k;
    }();
    return w;
}

// Planar single-channel field with valid-region separable convolution.
struct Field {
    int w = 0, h = 0;
    std::vector<Scalar> v;
    Field() = default;
    Field(int w_, int h_) : w(w_), h(h_), v((size_t)w_ * h_, 0) {}
    Scalar& at(int x, int y) { return v[(size_t)y * w + x]; }
    Scalar at(int x, int y) const { return v[(size_t)y * w + x]; }
};

Field conv_valid(const Field& in) {
    const auto& k = window();
    Field rows(in.w - kWin + 1, in.h);
    for (int y = 0; y < in.h; ++y)
        for (int x = 0; x < rows.w; ++x) {
            Scalar s = 0;
            for (int i = 0; i < kWin; ++i) s += k[i] * in.at(x + i, y);
            rows.at(x, y) = s;
        }
    Field out(rows.w, in.h - kWin + 1);
    for (int y = 0; y < out.h; ++y)
        for (int x = 0; x < out.w; ++x) {
            Scalar s = 0;
            for (int i = 0; i < kWin; ++i) s += k[i] * rows.at(x, y + i);
            out.at(x, y) = s;
        }
    return out;
}

// Adjoint of conv_valid: scatters gradient back to input support.
Field conv_valid_adjoint(const Field& g, int in_w, int in_h) {
    const auto& k = window();
    Field cols(g.w, in_h);
    for (int y = 0; y < g.h; ++y)
        for (int x = 0; x < g.w; ++x)
            for (int i = 0; i < kWin; ++i) cols.at(x, y + i) += k[i] * g.at(x, y);
    Field out(in_w, in_h);
    for (int y = 0; y < in_h; ++y)
        for (int x = 0; x < g.w; ++x)
            for (int i = 0; i < kWin; ++i) out.at(x + i, y) += k[i] * cols.at(x, y);
    return out;
}

Scalar ssim_impl(const Image& xi, const Image& yi, Image* grad) {
    if (!xi.same_shape(yi)) throw ShapeMismatchError();
    if (xi.width < kWin || xi.height < kWin)
        throw std::runtime_error("ssim: image smaller than the 11x11 window");
    if (grad) *grad = Image(xi.width, xi.height, xi.channels);

    const int C = xi.channels;
    Scalar total = 0;
    size_t count = 0;
    for (int ch = 0; ch < C; ++ch) {
        Field x(xi.width, xi.height), y(xi.width, xi.height);
        Field xx(xi.width, xi.height), yy(xi.width, xi.height), xy(xi.width, xi.height);
        for (int j = 0; j < xi.height; ++j)
            for (int i = 0; i < xi.width; ++i) {
                Scalar a = xi.at(i, j, ch), b = yi.at(i, j, ch);
                x.at(i, j) = a;
                y.at(i, j) = b;
                xx.at(i, j) = a * a;
                yy.at(i, j) = b * b;
                xy.at(i, j) = a * b;
            }
        Field mx = conv_valid(x), my = conv_valid(y);
        Field sxx = conv_valid(xx), syy = conv_valid(yy), sxy = conv_valid(xy);

        Field d_mx(mx.w, mx.h), d_sxx(mx.w, mx.h), d_sxy(mx.w, mx.h);
        for (int j = 0; j < mx.h; ++j)
            for (int i = 0; i < mx.w; ++i) {
                Scalar ux = mx.at(i, j), uy = my.at(i, j);
                Scalar vx = sxx.at(i, j) - ux * ux;
                Scalar vy = syy.at(i, j) - uy * uy;
                Scalar vxy = sxy.at(i, j) - ux * uy;
                Scalar a1 = 2 * ux * uy + kC1, a2 = 2 * vxy + kC2;
                Scalar b1 = ux * ux + uy * uy + kC1, b2 = vx + vy + kC2;
                Scalar ssim = (a1 * a2) / (b1 * b2);
                total += ssim;
                ++count;
                if (grad) {
                    // d(1 - mean ssim)/d ssim_pixel = -1/M, applied later.
                    Scalar d_ssim = 1;
                    Scalar d_a1 = d_ssim * a2 / (b1 * b2);
                    Scalar d_a2 = d_ssim * a1 / (b1 * b2);
                    Scalar d_b1 = -d_ssim * ssim / b1;
                    Scalar d_b2 = -d_ssim * ssim / b2;
                    Scalar d_ux = d_a1 * 2 * uy + d_b1 * 2 * ux;
                    Scalar d_vx = d_b2;
                    Scalar d_vxy = d_a2 * 2;
                    // vx = sxx - ux^2, vxy = sxy - ux uy
                    d_ux += -2 * ux * d_vx - uy * d_vxy;
                    d_mx.at(i, j) = d_ux;
                    d_sxx.at(i, j) = d_vx;
                    d_sxy.at(i, j) = d_vxy;
                }
            }
        if (grad) {
            Field gx = conv_valid_adjoint(d_mx, xi.width, xi.height);
            Field gxx = conv_valid_adjoint(d_sxx, xi.width, xi.height);
            Field gxy = conv_valid_adjoint(d_sxy, xi.width, xi.height);
            for (int j = 0; j < xi.height; ++j)
                for (int i = 0; i < xi.width; ++i)
                    grad->at(i, j, ch) =
                        gx.at(i, j) + 2 * x.at(i, j) * gxx.at(i, j) + y.at(i, j) * gxy.at(i, j);
        }
    }
    Scalar mean = total / (Scalar)count;
    if (grad) {
        Scalar f = -1 / (Scalar)count;  // loss = 1 - mean ssim
        for (auto& v : grad->data) v *= f;
    }
    return 1 - mean;
}

}  // namespace

Scalar ssim_loss(const Image& rendered, const Image& target) {
    return ssim_impl(rendered, target, nullptr);
}

Scalar ssim_loss_with_grad(const Image& rendered, const Image& target, Image* grad) {
    return ssim_impl(rendered, target, grad);
}

}  // namespace rgs
