#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hsr/errors.hpp"
#include "hsr/rng.hpp"

namespace hsr {

// Dense N,C,H,W shape. Weight tensors reuse the same four slots:
// conv weight = (outC, inC, kH, kW), linear weight = (outC, inC, 1, 1),
// bias = (outC, 1, 1, 1).
struct Shape {
    int n = 0, c = 0, h = 0, w = 0;

    std::int64_t numel() const {
        return static_cast<std::int64_t>(n) * c * h * w;
    }
    bool operator==(const Shape&) const = default;

    std::string str() const {
        return std::to_string(n) + "x" + std::to_string(c) + "x" +
               std::to_string(h) + "x" + std::to_string(w);
    }
};

// Row-major N,C,H,W buffer. Immutable after creation except for the grad
// buffer, which backward passes accumulate into.
template <typename T>
struct Tensor {
    Shape shape;
    std::vector<T> data;
    bool requires_grad = false;
    std::vector<T> grad; // empty until ensure_grad()/backward

    Tensor() = default;
    explicit Tensor(Shape s, T fill = T(0))
        : shape(s), data(static_cast<std::size_t>(s.numel()), fill) {}

    static Tensor zeros(Shape s) { return Tensor(s); }

    static Tensor full(Shape s, T v) { return Tensor(s, v); }

    static Tensor uniform(Shape s, Rng& rng, T lo, T hi) {
        Tensor t(s);
        for (auto& v : t.data) v = static_cast<T>(rng.uniform(lo, hi));
        return t;
    }

    std::int64_t index(int in, int ic, int ih, int iw) const {
        return ((static_cast<std::int64_t>(in) * shape.c + ic) * shape.h + ih) * shape.w + iw;
    }

    T& at(int in, int ic, int ih, int iw) { return data[index(in, ic, ih, iw)]; }
    T at(int in, int ic, int ih, int iw) const { return data[index(in, ic, ih, iw)]; }

    std::int64_t numel() const { return shape.numel(); }

    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), T(0));
    }

    void zero_grad() {
        if (!grad.empty()) std::fill(grad.begin(), grad.end(), T(0));
    }

    bool all_finite() const {
        for (T v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }
};

} // namespace hsr
