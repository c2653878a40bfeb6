#include "reference.hpp"

#include <cmath>

namespace hsr::ref {

namespace {

inline int mirror(int i, int extent) {
    if (i < 0) return -i;
    if (i >= extent) return 2 * (extent - 1) - i;
    return i;
}

} // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                 int stride, kernels::Pad pad) {
    const int N = x.shape.n, C = x.shape.c, H = x.shape.h, W = x.shape.w;
    const int OC = w.shape.n, KH = w.shape.h, KW = w.shape.w;
    const int ph = KH / 2, pw = KW / 2;
    const int OH = (H + stride - 1) / stride, OW = (W + stride - 1) / stride;
    Tensor<T> out(Shape{N, OC, OH, OW});
    for (int n = 0; n < N; ++n)
        for (int oc = 0; oc < OC; ++oc)
            for (int oh = 0; oh < OH; ++oh)
                for (int ow = 0; ow < OW; ++ow) {
                    T acc = b.data[oc];
                    for (int ic = 0; ic < C; ++ic)
                        for (int kh = 0; kh < KH; ++kh)
                            for (int kw = 0; kw < KW; ++kw) {
                                const int ih = oh * stride + kh - ph;
                                const int iw = ow * stride + kw - pw;
                                T v;
                                if (pad == kernels::Pad::Zero) {
                                    v = (ih < 0 || ih >= H || iw < 0 || iw >= W)
                                            ? T(0)
                                            : x.at(n, ic, ih, iw);
                                } else {
                                    v = x.at(n, ic, mirror(ih, H), mirror(iw, W));
                                }
                                acc += v * w.at(oc, ic, kh, kw);
                            }
                    out.at(n, oc, oh, ow) = acc;
                }
    return out;
}

template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& x, int r) {
    const int N = x.shape.n, C = x.shape.c, H = x.shape.h, W = x.shape.w;
    Tensor<T> out(Shape{N, C / (r * r), H * r, W * r});
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C / (r * r); ++c)
            for (int h = 0; h < H; ++h)
                for (int w = 0; w < W; ++w)
                    for (int dy = 0; dy < r; ++dy)
                        for (int dx = 0; dx < r; ++dx)
                            out.at(n, c, h * r + dy, w * r + dx) =
                                x.at(n, c * r * r + dy * r + dx, h, w);
    return out;
}

template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& x, int r) {
    const int N = x.shape.n, C = x.shape.c, H = x.shape.h, W = x.shape.w;
    Tensor<T> out(Shape{N, C * r * r, H / r, W / r});
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c)
            for (int h = 0; h < H / r; ++h)
                for (int w = 0; w < W / r; ++w)
                    for (int dy = 0; dy < r; ++dy)
                        for (int dx = 0; dx < r; ++dx)
                            out.at(n, c * r * r + dy * r + dx, h, w) =
                                x.at(n, c, h * r + dy, w * r + dx);
    return out;
}

template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x) {
    const int N = x.shape.n, C = x.shape.c, H = x.shape.h, W = x.shape.w;
    Tensor<T> out(Shape{N, C, 1, 1});
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c) {
            double s = 0.0;
            for (int h = 0; h < H; ++h)
                for (int w = 0; w < W; ++w) s += static_cast<double>(x.at(n, c, h, w));
            out.at(n, c, 0, 0) = static_cast<T>(s / (static_cast<double>(H) * W));
        }
    return out;
}

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
    const int N = x.shape.n, C = x.shape.c, OC = w.shape.n;
    Tensor<T> out(Shape{N, OC, 1, 1});
    for (int n = 0; n < N; ++n)
        for (int oc = 0; oc < OC; ++oc) {
            T acc = b.data[oc];
            for (int c = 0; c < C; ++c) acc += w.at(oc, c, 0, 0) * x.at(n, c, 0, 0);
            out.at(n, oc, 0, 0) = acc;
        }
    return out;
}

double mrae_loops(const float* pred, const float* gt, int h, int w, int bands, double eps) {
    double s = 0.0;
    for (int b = 0; b < bands; ++b)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const std::int64_t i = (static_cast<std::int64_t>(b) * h + y) * w + x;
                const double p = pred[i], g = gt[i];
                s += std::abs(p - g) / std::max(g, eps);
            }
    return s / (static_cast<double>(bands) * h * w);
}

double rmse_loops(const float* pred, const float* gt, int h, int w, int bands) {
    double s = 0.0;
    for (int b = 0; b < bands; ++b)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const std::int64_t i = (static_cast<std::int64_t>(b) * h + y) * w + x;
                const double d = static_cast<double>(pred[i]) - static_cast<double>(gt[i]);
                s += d * d;
            }
    return std::sqrt(s / (static_cast<double>(bands) * h * w));
}

double bpmrae_loops(const float* pred, const float* gt, int h, int w, int bands,
                    const double* resp, double eps) {
    double s = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) {
                double rp = 0.0, rg = 0.0;
                for (int b = 0; b < bands; ++b) {
                    const std::int64_t i = (static_cast<std::int64_t>(b) * h + y) * w + x;
                    rp += static_cast<double>(pred[i]) * resp[b * 3 + c];
                    rg += static_cast<double>(gt[i]) * resp[b * 3 + c];
                }
                s += std::abs(rp - rg) / std::max(rg, eps);
            }
    return s / (3.0 * h * w);
}

#define HSR_REF_INSTANTIATE(T)                                                                    \
    template Tensor<T> conv2d<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, int,      \
                                 kernels::Pad);                                                   \
    template Tensor<T> pixel_shuffle<T>(const Tensor<T>&, int);                                  \
    template Tensor<T> pixel_unshuffle<T>(const Tensor<T>&, int);                                \
    template Tensor<T> global_avg_pool<T>(const Tensor<T>&);                                     \
    template Tensor<T> linear<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);

HSR_REF_INSTANTIATE(float)
HSR_REF_INSTANTIATE(double)

#undef HSR_REF_INSTANTIATE

} // namespace hsr::ref
