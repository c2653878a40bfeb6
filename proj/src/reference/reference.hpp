#pragma once

#include "hsr/kernels.hpp"

// Naive serial implementations written directly from the operation
// definitions. Used only by tests and the kernel benchmark as an
// independent oracle for the OpenMP kernels and the metrics; never linked
// into the library or the CLI.

namespace hsr::ref {

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                 int stride, kernels::Pad pad);

template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& x, int r);

template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& x, int r);

template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x);

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b);

// Metric oracles over raw band-major buffers (band, row, col).
double mrae_loops(const float* pred, const float* gt, int h, int w, int bands, double eps);
double rmse_loops(const float* pred, const float* gt, int h, int w, int bands);
double bpmrae_loops(const float* pred, const float* gt, int h, int w, int bands,
                    const double* resp /* bands x 3, row-major */, double eps);

} // namespace hsr::ref
