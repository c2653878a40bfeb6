#pragma once

#include "hsr/tensor.hpp"

// OpenMP-parallel tensor kernels. Every parallel loop assigns each output
// element in exactly one thread with a fixed inner accumulation order, so
// results are bit-identical for any thread count.
//
// A naive serial implementation of the same contracts lives in
// src/reference/ and is used by tests and the benchmark only.

namespace hsr::kernels {

enum class Pad { Zero, Reflect };
enum class Act { LeakyRelu, Sigmoid, Identity };

// "Same" convolution: pad floor(k/2) per side, odd kernels only.
// x: (N, inC, H, W), w: (outC, inC, kH, kW), b: (outC,1,1,1).
// Output (N, outC, ceil(H/stride), ceil(W/stride)).
template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                 int stride, Pad pad);

// Accumulates into any non-null gradient tensor (shapes must match x/w/b).
template <typename T>
void conv2d_backward(const Tensor<T>& x, const Tensor<T>& w, int stride, Pad pad,
                     const Tensor<T>& gout,
                     Tensor<T>* gx, Tensor<T>* gw, Tensor<T>* gb);

// out(n, c, h*r+dy, w*r+dx) = in(n, c*r^2 + dy*r + dx, h, w)
template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& x, int r);

template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& x, int r);

template <typename T>
Tensor<T> activation(const Tensor<T>& x, Act kind, T slope);

template <typename T>
void activation_backward(const Tensor<T>& x, const Tensor<T>& y, Act kind, T slope,
                         const Tensor<T>& gout, Tensor<T>* gx);

template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x);

template <typename T>
void global_avg_pool_backward(const Shape& in_shape, const Tensor<T>& gout, Tensor<T>* gx);

// x: (N, C, 1, 1), w: (outC, C, 1, 1), b: (outC,1,1,1) -> (N, outC, 1, 1)
template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b);

template <typename T>
void linear_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& gout,
                     Tensor<T>* gx, Tensor<T>* gw, Tensor<T>* gb);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);

// Elementwise product; either side may be (N,C,1,1) against (N,C,H,W).
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
void mul_backward(const Tensor<T>& a, const Tensor<T>& b, const Tensor<T>& gout,
                  Tensor<T>* ga, Tensor<T>* gb);

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
void concat_channels_backward(int ca, const Tensor<T>& gout, Tensor<T>* ga, Tensor<T>* gb);

} // namespace hsr::kernels
