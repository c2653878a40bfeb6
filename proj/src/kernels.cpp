#include "hsr/kernels.hpp"

#include <algorithm>
#include <cstring>

namespace hsr::kernels {

namespace {

// Mirror index about the edges without repeating the edge pixel.
// Valid for pad <= extent-1, which conv2d checks up front.
inline int reflect_index(int i, int extent) {
    if (i < 0) return -i;
    if (i >= extent) return 2 * (extent - 1) - i;
    return i;
}

template <typename T>
std::vector<T> pad_plane_input(const Tensor<T>& x, int ph, int pw, Pad pad) {
    const int N = x.shape.n, C = x.shape.c, H = x.shape.h, W = x.shape.w;
    const int Hp = H + 2 * ph, Wp = W + 2 * pw;
    std::vector<T> out(static_cast<std::size_t>(N) * C * Hp * Wp, T(0));
#pragma omp parallel for collapse(2)
    for (int n = 0; n < N; ++n) {
        for (int c = 0; c < C; ++c) {
            const T* src = x.data.data() + x.index(n, c, 0, 0);
            T* dst = out.data() + (static_cast<std::int64_t>(n) * C + c) * Hp * Wp;
            if (pad == Pad::Zero) {
                for (int h = 0; h < H; ++h)
                    std::memcpy(dst + static_cast<std::int64_t>(h + ph) * Wp + pw,
                                src + static_cast<std::int64_t>(h) * W, sizeof(T) * W);
            } else {
                for (int hp = 0; hp < Hp; ++hp) {
                    const int sh = reflect_index(hp - ph, H);
                    const T* srow = src + static_cast<std::int64_t>(sh) * W;
                    T* drow = dst + static_cast<std::int64_t>(hp) * Wp;
                    for (int wp = 0; wp < Wp; ++wp)
                        drow[wp] = srow[reflect_index(wp - pw, W)];
                }
            }
        }
    }
    return out;
}

// Folds gradients w.r.t. the padded buffer back onto the input gradient.
template <typename T>
void unpad_adjoint(const std::vector<T>& gpad, int N, int C, int H, int W,
                   int ph, int pw, Pad pad, Tensor<T>* gx) {
    const int Hp = H + 2 * ph, Wp = W + 2 * pw;
#pragma omp parallel for collapse(2)
    for (int n = 0; n < N; ++n) {
        for (int c = 0; c < C; ++c) {
            const T* src = gpad.data() + (static_cast<std::int64_t>(n) * C + c) * Hp * Wp;
            T* dst = gx->data.data() + gx->index(n, c, 0, 0);
            if (pad == Pad::Zero) {
                for (int h = 0; h < H; ++h) {
                    const T* srow = src + static_cast<std::int64_t>(h + ph) * Wp + pw;
                    T* drow = dst + static_cast<std::int64_t>(h) * W;
                    for (int w = 0; w < W; ++w) drow[w] += srow[w];
                }
            } else {
                for (int hp = 0; hp < Hp; ++hp) {
                    const int sh = reflect_index(hp - ph, H);
                    const T* srow = src + static_cast<std::int64_t>(hp) * Wp;
                    T* drow = dst + static_cast<std::int64_t>(sh) * W;
                    for (int wp = 0; wp < Wp; ++wp)
                        drow[reflect_index(wp - pw, W)] += srow[wp];
                }
            }
        }
    }
}

template <typename T>
void check_conv_args(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>* b,
                     int stride, Pad pad) {
    const int kh = w.shape.h, kw = w.shape.w;
    if (stride < 1) throw ShapeError("conv2d: stride must be positive");
    if (kh % 2 == 0 || kw % 2 == 0)
        throw ShapeError("conv2d: even kernel sizes are rejected, got " +
                         std::to_string(kh) + "x" + std::to_string(kw));
    if (x.shape.c != w.shape.c)
        throw ShapeError("conv2d: input channels " + std::to_string(x.shape.c) +
                         " != weight in-channels " + std::to_string(w.shape.c));
    if (b && !(b->shape == Shape{w.shape.n, 1, 1, 1}))
        throw ShapeError("conv2d: bias shape " + b->shape.str() + " != (" +
                         std::to_string(w.shape.n) + ",1,1,1)");
    if (pad == Pad::Reflect && (kh / 2 >= x.shape.h || kw / 2 >= x.shape.w))
        throw PaddingError("conv2d: reflect pad " + std::to_string(kh / 2) + "x" +
                           std::to_string(kw / 2) + " too wide for input " +
                           std::to_string(x.shape.h) + "x" + std::to_string(x.shape.w));
}

} // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                 int stride, Pad pad) {
    check_conv_args(x, w, &b, stride, pad);
    const int N = x.shape.n, C = x.shape.c, H = x.shape.h, W = x.shape.w;
    const int OC = w.shape.n, KH = w.shape.h, KW = w.shape.w;
    const int ph = KH / 2, pw = KW / 2;
    const int OH = (H + stride - 1) / stride, OW = (W + stride - 1) / stride;
    const int Hp = H + 2 * ph, Wp = W + 2 * pw;

    const std::vector<T> xp = pad_plane_input(x, ph, pw, pad);
    Tensor<T> out(Shape{N, OC, OH, OW});

#pragma omp parallel for collapse(2)
    for (int n = 0; n < N; ++n) {
        for (int oc = 0; oc < OC; ++oc) {
            const T bias = b.data[oc];
            for (int oh = 0; oh < OH; ++oh) {
                T* orow = out.data.data() + out.index(n, oc, oh, 0);
                for (int ow = 0; ow < OW; ++ow) orow[ow] = bias;
                for (int ic = 0; ic < C; ++ic) {
                    const T* plane = xp.data() + (static_cast<std::int64_t>(n) * C + ic) * Hp * Wp;
                    const T* wk = w.data.data() + w.index(oc, ic, 0, 0);
                    for (int kh = 0; kh < KH; ++kh) {
                        const T* irow = plane + static_cast<std::int64_t>(oh * stride + kh) * Wp;
                        const T* wrow = wk + static_cast<std::int64_t>(kh) * KW;
                        if (KW == 3 && stride == 1) {
                            const T w0 = wrow[0], w1 = wrow[1], w2 = wrow[2];
                            for (int ow = 0; ow < OW; ++ow)
                                orow[ow] += w0 * irow[ow] + w1 * irow[ow + 1] + w2 * irow[ow + 2];
                        } else if (stride == 1) {
                            for (int kw = 0; kw < KW; ++kw) {
                                const T wv = wrow[kw];
                                for (int ow = 0; ow < OW; ++ow)
                                    orow[ow] += wv * irow[ow + kw];
                            }
                        } else {
                            for (int kw = 0; kw < KW; ++kw) {
                                const T wv = wrow[kw];
                                for (int ow = 0; ow < OW; ++ow)
                                    orow[ow] += wv * irow[ow * stride + kw];
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

template <typename T>
void conv2d_backward(const Tensor<T>& x, const Tensor<T>& w, int stride, Pad pad,
                     const Tensor<T>& gout,
                     Tensor<T>* gx, Tensor<T>* gw, Tensor<T>* gb) {
    check_conv_args(x, w, static_cast<const Tensor<T>*>(nullptr), stride, pad);
    const int N = x.shape.n, C = x.shape.c, H = x.shape.h, W = x.shape.w;
    const int OC = w.shape.n, KH = w.shape.h, KW = w.shape.w;
    const int ph = KH / 2, pw = KW / 2;
    const int OH = gout.shape.h, OW = gout.shape.w;
    const int Hp = H + 2 * ph, Wp = W + 2 * pw;

    if (!(gout.shape == Shape{N, OC, (H + stride - 1) / stride, (W + stride - 1) / stride}))
        throw ShapeError("conv2d_backward: gout shape " + gout.shape.str() + " mismatch");

    if (gx) {
        std::vector<T> gpad(static_cast<std::size_t>(N) * C * Hp * Wp, T(0));
#pragma omp parallel for collapse(2)
        for (int n = 0; n < N; ++n) {
            for (int ic = 0; ic < C; ++ic) {
                T* plane = gpad.data() + (static_cast<std::int64_t>(n) * C + ic) * Hp * Wp;
                for (int oc = 0; oc < OC; ++oc) {
                    const T* wk = w.data.data() + w.index(oc, ic, 0, 0);
                    for (int oh = 0; oh < OH; ++oh) {
                        const T* grow = gout.data.data() + gout.index(n, oc, oh, 0);
                        for (int kh = 0; kh < KH; ++kh) {
                            T* prow = plane + static_cast<std::int64_t>(oh * stride + kh) * Wp;
                            const T* wrow = wk + static_cast<std::int64_t>(kh) * KW;
                            if (KW == 3 && stride == 1) {
                                const T w0 = wrow[0], w1 = wrow[1], w2 = wrow[2];
                                for (int ow = 0; ow < OW; ++ow) {
                                    const T g = grow[ow];
                                    prow[ow] += w0 * g;
                                    prow[ow + 1] += w1 * g;
                                    prow[ow + 2] += w2 * g;
                                }
                            } else {
                                for (int kw = 0; kw < KW; ++kw) {
                                    const T wv = wrow[kw];
                                    for (int ow = 0; ow < OW; ++ow)
                                        prow[ow * stride + kw] += wv * grow[ow];
                                }
                            }
                        }
                    }
                }
            }
        }
        unpad_adjoint(gpad, N, C, H, W, ph, pw, pad, gx);
    }

    if (gw) {
        const std::vector<T> xp = pad_plane_input(x, ph, pw, pad);
#pragma omp parallel for collapse(2)
        for (int oc = 0; oc < OC; ++oc) {
            for (int ic = 0; ic < C; ++ic) {
                T* acc = gw->data.data() + gw->index(oc, ic, 0, 0);
                for (int n = 0; n < N; ++n) {
                    const T* plane = xp.data() + (static_cast<std::int64_t>(n) * C + ic) * Hp * Wp;
                    for (int kh = 0; kh < KH; ++kh) {
                        for (int kw = 0; kw < KW; ++kw) {
                            T s = T(0);
                            for (int oh = 0; oh < OH; ++oh) {
                                const T* grow = gout.data.data() + gout.index(n, oc, oh, 0);
                                const T* irow = plane + static_cast<std::int64_t>(oh * stride + kh) * Wp + kw;
                                if (stride == 1) {
                                    for (int ow = 0; ow < OW; ++ow) s += grow[ow] * irow[ow];
                                } else {
                                    for (int ow = 0; ow < OW; ++ow) s += grow[ow] * irow[ow * stride];
                                }
                            }
                            acc[kh * KW + kw] += s;
                        }
                    }
                }
            }
        }
    }

    if (gb) {
#pragma omp parallel for
        for (int oc = 0; oc < OC; ++oc) {
            T s = T(0);
            for (int n = 0; n < N; ++n) {
                const T* g = gout.data.data() + gout.index(n, oc, 0, 0);
                for (int i = 0; i < OH * OW; ++i) s += g[i];
            }
            gb->data[oc] += s;
        }
    }
}

template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& x, int r) {
    if (r < 1) throw ShapeError("pixel_shuffle: factor must be positive");
    const int N = x.shape.n, C = x.shape.c, H = x.shape.h, W = x.shape.w;
    if (C % (r * r) != 0)
        throw ShapeError("pixel_shuffle: channels " + std::to_string(C) +
                         " not divisible by r^2=" + std::to_string(r * r));
    const int OC = C / (r * r);
    Tensor<T> out(Shape{N, OC, H * r, W * r});
#pragma omp parallel for collapse(2) if (x.numel() > 4096)
    for (int n = 0; n < N; ++n) {
        for (int ci = 0; ci < C; ++ci) {
            const int c = ci / (r * r), rem = ci % (r * r);
            const int dy = rem / r, dx = rem % r;
            for (int h = 0; h < H; ++h) {
                const T* irow = x.data.data() + x.index(n, ci, h, 0);
                T* orow = out.data.data() + out.index(n, c, h * r + dy, dx);
                for (int w = 0; w < W; ++w) orow[static_cast<std::int64_t>(w) * r] = irow[w];
            }
        }
    }
    return out;
}

template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& x, int r) {
    if (r < 1) throw ShapeError("pixel_unshuffle: factor must be positive");
    const int N = x.shape.n, C = x.shape.c, H = x.shape.h, W = x.shape.w;
    if (H % r != 0 || W % r != 0)
        throw ShapeError("pixel_unshuffle: spatial " + std::to_string(H) + "x" +
                         std::to_string(W) + " not divisible by r=" + std::to_string(r));
    Tensor<T> out(Shape{N, C * r * r, H / r, W / r});
#pragma omp parallel for collapse(2) if (x.numel() > 4096)
    for (int n = 0; n < N; ++n) {
        for (int co = 0; co < C * r * r; ++co) {
            const int c = co / (r * r), rem = co % (r * r);
            const int dy = rem / r, dx = rem % r;
            for (int h = 0; h < H / r; ++h) {
                const T* irow = x.data.data() + x.index(n, c, h * r + dy, dx);
                T* orow = out.data.data() + out.index(n, co, h, 0);
                for (int w = 0; w < W / r; ++w) orow[w] = irow[static_cast<std::int64_t>(w) * r];
            }
        }
    }
    return out;
}

template <typename T>
Tensor<T> activation(const Tensor<T>& x, Act kind, T slope) {
    Tensor<T> out(x.shape);
    const std::int64_t n = x.numel();
    const T* in = x.data.data();
    T* o = out.data.data();
    switch (kind) {
    case Act::LeakyRelu:
#pragma omp parallel for if (n > 16384)
        for (std::int64_t i = 0; i < n; ++i) o[i] = in[i] >= T(0) ? in[i] : slope * in[i];
        break;
    case Act::Sigmoid:
#pragma omp parallel for if (n > 16384)
        for (std::int64_t i = 0; i < n; ++i) {
            const T v = in[i];
            o[i] = v >= T(0) ? T(1) / (T(1) + std::exp(-v))
                             : std::exp(v) / (T(1) + std::exp(v));
        }
        break;
    case Act::Identity:
        std::copy(in, in + n, o);
        break;
    }
    return out;
}

template <typename T>
void activation_backward(const Tensor<T>& x, const Tensor<T>& y, Act kind, T slope,
                         const Tensor<T>& gout, Tensor<T>* gx) {
    const std::int64_t n = x.numel();
    const T* in = x.data.data();
    const T* yo = y.data.data();
    const T* g = gout.data.data();
    T* o = gx->data.data();
    switch (kind) {
    case Act::LeakyRelu:
#pragma omp parallel for if (n > 16384)
        for (std::int64_t i = 0; i < n; ++i) o[i] += g[i] * (in[i] >= T(0) ? T(1) : slope);
        break;
    case Act::Sigmoid:
#pragma omp parallel for if (n > 16384)
        for (std::int64_t i = 0; i < n; ++i) o[i] += g[i] * yo[i] * (T(1) - yo[i]);
        break;
    case Act::Identity:
#pragma omp parallel for if (n > 16384)
        for (std::int64_t i = 0; i < n; ++i) o[i] += g[i];
        break;
    }
}

template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x) {
    const int N = x.shape.n, C = x.shape.c;
    const std::int64_t hw = static_cast<std::int64_t>(x.shape.h) * x.shape.w;
    Tensor<T> out(Shape{N, C, 1, 1});
#pragma omp parallel for collapse(2) if (x.numel() > 16384)
    for (int n = 0; n < N; ++n) {
        for (int c = 0; c < C; ++c) {
            const T* p = x.data.data() + x.index(n, c, 0, 0);
            double s = 0.0;
            for (std::int64_t i = 0; i < hw; ++i) s += static_cast<double>(p[i]);
            out.data[static_cast<std::int64_t>(n) * C + c] = static_cast<T>(s / static_cast<double>(hw));
        }
    }
    return out;
}

template <typename T>
void global_avg_pool_backward(const Shape& in_shape, const Tensor<T>& gout, Tensor<T>* gx) {
    const int N = in_shape.n, C = in_shape.c;
    const std::int64_t hw = static_cast<std::int64_t>(in_shape.h) * in_shape.w;
    const T inv = static_cast<T>(1.0 / static_cast<double>(hw));
#pragma omp parallel for collapse(2) if (in_shape.numel() > 16384)
    for (int n = 0; n < N; ++n) {
        for (int c = 0; c < C; ++c) {
            const T g = gout.data[static_cast<std::int64_t>(n) * C + c] * inv;
            T* p = gx->data.data() + gx->index(n, c, 0, 0);
            for (std::int64_t i = 0; i < hw; ++i) p[i] += g;
        }
    }
}

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
    if (x.shape.h != 1 || x.shape.w != 1)
        throw ShapeError("linear: input spatial dims must be 1x1, got " + x.shape.str());
    if (w.shape.c != x.shape.c || w.shape.h != 1 || w.shape.w != 1)
        throw ShapeError("linear: weight shape " + w.shape.str() + " incompatible with input " +
                         x.shape.str());
    const int N = x.shape.n, C = x.shape.c, OC = w.shape.n;
    if (!(b.shape == Shape{OC, 1, 1, 1}))
        throw ShapeError("linear: bias shape " + b.shape.str());
    Tensor<T> out(Shape{N, OC, 1, 1});
    for (int n = 0; n < N; ++n) {
        const T* xv = x.data.data() + static_cast<std::int64_t>(n) * C;
        T* ov = out.data.data() + static_cast<std::int64_t>(n) * OC;
        for (int oc = 0; oc < OC; ++oc) {
            T s = b.data[oc];
            const T* wr = w.data.data() + static_cast<std::int64_t>(oc) * C;
            for (int c = 0; c < C; ++c) s += wr[c] * xv[c];
            ov[oc] = s;
        }
    }
    return out;
}

template <typename T>
void linear_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& gout,
                     Tensor<T>* gx, Tensor<T>* gw, Tensor<T>* gb) {
    const int N = x.shape.n, C = x.shape.c, OC = w.shape.n;
    for (int n = 0; n < N; ++n) {
        const T* xv = x.data.data() + static_cast<std::int64_t>(n) * C;
        const T* gv = gout.data.data() + static_cast<std::int64_t>(n) * OC;
        for (int oc = 0; oc < OC; ++oc) {
            const T g = gv[oc];
            const T* wr = w.data.data() + static_cast<std::int64_t>(oc) * C;
            if (gx) {
                T* gxv = gx->data.data() + static_cast<std::int64_t>(n) * C;
                for (int c = 0; c < C; ++c) gxv[c] += g * wr[c];
            }
            if (gw) {
                T* gwr = gw->data.data() + static_cast<std::int64_t>(oc) * C;
                for (int c = 0; c < C; ++c) gwr[c] += g * xv[c];
            }
            if (gb) gb->data[oc] += g;
        }
    }
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
    if (!(a.shape == b.shape))
        throw ShapeError("add: shape mismatch " + a.shape.str() + " vs " + b.shape.str());
    Tensor<T> out(a.shape);
    const std::int64_t n = a.numel();
#pragma omp parallel for if (n > 16384)
    for (std::int64_t i = 0; i < n; ++i) out.data[i] = a.data[i] + b.data[i];
    return out;
}

namespace {

template <typename T>
bool is_channel_vector_against(const Tensor<T>& v, const Tensor<T>& full) {
    return v.shape.n == full.shape.n && v.shape.c == full.shape.c &&
           v.shape.h == 1 && v.shape.w == 1;
}

} // namespace

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.shape == b.shape) {
        Tensor<T> out(a.shape);
        const std::int64_t n = a.numel();
#pragma omp parallel for if (n > 16384)
        for (std::int64_t i = 0; i < n; ++i) out.data[i] = a.data[i] * b.data[i];
        return out;
    }
    const Tensor<T>* full = nullptr;
    const Tensor<T>* vec = nullptr;
    if (is_channel_vector_against(b, a)) {
        full = &a;
        vec = &b;
    } else if (is_channel_vector_against(a, b)) {
        full = &b;
        vec = &a;
    } else {
        throw ShapeError("mul: incompatible shapes " + a.shape.str() + " vs " + b.shape.str());
    }
    const int N = full->shape.n, C = full->shape.c;
    const std::int64_t hw = static_cast<std::int64_t>(full->shape.h) * full->shape.w;
    Tensor<T> out(full->shape);
#pragma omp parallel for collapse(2) if (full->numel() > 16384)
    for (int n = 0; n < N; ++n) {
        for (int c = 0; c < C; ++c) {
            const T s = vec->data[static_cast<std::int64_t>(n) * C + c];
            const T* p = full->data.data() + full->index(n, c, 0, 0);
            T* o = out.data.data() + out.index(n, c, 0, 0);
            for (std::int64_t i = 0; i < hw; ++i) o[i] = p[i] * s;
        }
    }
    return out;
}

template <typename T>
void mul_backward(const Tensor<T>& a, const Tensor<T>& b, const Tensor<T>& gout,
                  Tensor<T>* ga, Tensor<T>* gb) {
    if (a.shape == b.shape) {
        const std::int64_t n = a.numel();
        if (ga)
#pragma omp parallel for if (n > 16384)
            for (std::int64_t i = 0; i < n; ++i) ga->data[i] += gout.data[i] * b.data[i];
        if (gb)
#pragma omp parallel for if (n > 16384)
            for (std::int64_t i = 0; i < n; ++i) gb->data[i] += gout.data[i] * a.data[i];
        return;
    }
    // One side is the (N,C,1,1) channel vector.
    const bool b_is_vec = is_channel_vector_against(b, a);
    const Tensor<T>& full = b_is_vec ? a : b;
    const Tensor<T>& vec = b_is_vec ? b : a;
    Tensor<T>* gfull = b_is_vec ? ga : gb;
    Tensor<T>* gvec = b_is_vec ? gb : ga;
    const int N = full.shape.n, C = full.shape.c;
    const std::int64_t hw = static_cast<std::int64_t>(full.shape.h) * full.shape.w;
#pragma omp parallel for collapse(2) if (full.numel() > 16384)
    for (int n = 0; n < N; ++n) {
        for (int c = 0; c < C; ++c) {
            const std::int64_t vi = static_cast<std::int64_t>(n) * C + c;
            const T* g = gout.data.data() + gout.index(n, c, 0, 0);
            if (gfull) {
                const T s = vec.data[vi];
                T* o = gfull->data.data() + gfull->index(n, c, 0, 0);
                for (std::int64_t i = 0; i < hw; ++i) o[i] += g[i] * s;
            }
            if (gvec) {
                const T* p = full.data.data() + full.index(n, c, 0, 0);
                T s = T(0);
                for (std::int64_t i = 0; i < hw; ++i) s += g[i] * p[i];
                gvec->data[vi] += s;
            }
        }
    }
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.shape.n != b.shape.n || a.shape.h != b.shape.h || a.shape.w != b.shape.w)
        throw ShapeError("concat_channels: N/H/W mismatch " + a.shape.str() + " vs " +
                         b.shape.str());
    const int N = a.shape.n, CA = a.shape.c, CB = b.shape.c;
    const std::int64_t hw = static_cast<std::int64_t>(a.shape.h) * a.shape.w;
    Tensor<T> out(Shape{N, CA + CB, a.shape.h, a.shape.w});
#pragma omp parallel for if (out.numel() > 16384)
    for (int n = 0; n < N; ++n) {
        std::memcpy(out.data.data() + out.index(n, 0, 0, 0),
                    a.data.data() + a.index(n, 0, 0, 0), sizeof(T) * CA * hw);
        std::memcpy(out.data.data() + out.index(n, CA, 0, 0),
                    b.data.data() + b.index(n, 0, 0, 0), sizeof(T) * CB * hw);
    }
    return out;
}

template <typename T>
void concat_channels_backward(int ca, const Tensor<T>& gout, Tensor<T>* ga, Tensor<T>* gb) {
    const int N = gout.shape.n, C = gout.shape.c;
    const std::int64_t hw = static_cast<std::int64_t>(gout.shape.h) * gout.shape.w;
    const int cb = C - ca;
#pragma omp parallel for if (gout.numel() > 16384)
    for (int n = 0; n < N; ++n) {
        if (ga) {
            const T* src = gout.data.data() + gout.index(n, 0, 0, 0);
            T* dst = ga->data.data() + ga->index(n, 0, 0, 0);
            for (std::int64_t i = 0; i < ca * hw; ++i) dst[i] += src[i];
        }
        if (gb) {
            const T* src = gout.data.data() + gout.index(n, ca, 0, 0);
            T* dst = gb->data.data() + gb->index(n, 0, 0, 0);
            for (std::int64_t i = 0; i < cb * hw; ++i) dst[i] += src[i];
        }
    }
}

#define HSR_INSTANTIATE(T)                                                                        \
    template Tensor<T> conv2d<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, int, Pad); \
    template void conv2d_backward<T>(const Tensor<T>&, const Tensor<T>&, int, Pad,                \
                                     const Tensor<T>&, Tensor<T>*, Tensor<T>*, Tensor<T>*);       \
    template Tensor<T> pixel_shuffle<T>(const Tensor<T>&, int);                                   \
    template Tensor<T> pixel_unshuffle<T>(const Tensor<T>&, int);                                 \
    template Tensor<T> activation<T>(const Tensor<T>&, Act, T);                                   \
    template void activation_backward<T>(const Tensor<T>&, const Tensor<T>&, Act, T,              \
                                         const Tensor<T>&, Tensor<T>*);                           \
    template Tensor<T> global_avg_pool<T>(const Tensor<T>&);                                      \
    template void global_avg_pool_backward<T>(const Shape&, const Tensor<T>&, Tensor<T>*);        \
    template Tensor<T> linear<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);           \
    template void linear_backward<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,        \
                                     Tensor<T>*, Tensor<T>*, Tensor<T>*);                         \
    template Tensor<T> add<T>(const Tensor<T>&, const Tensor<T>&);                                \
    template Tensor<T> mul<T>(const Tensor<T>&, const Tensor<T>&);                                \
    template void mul_backward<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,           \
                                  Tensor<T>*, Tensor<T>*);                                        \
    template Tensor<T> concat_channels<T>(const Tensor<T>&, const Tensor<T>&);                    \
    template void concat_channels_backward<T>(int, const Tensor<T>&, Tensor<T>*, Tensor<T>*);

HSR_INSTANTIATE(float)
HSR_INSTANTIATE(double)

#undef HSR_INSTANTIATE

} // namespace hsr::kernels
