#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hsr/errors.hpp"
#include "hsr/rng.hpp"

namespace hsr {

inline constexpr int kBands = 31;
inline constexpr double kBandStartNm = 400.0;
inline constexpr double kBandStepNm = 10.0;

inline double band_center_nm(int band) { return kBandStartNm + kBandStepNm * band; }

// H x W x 31 radiance cube, values in [0,1], stored band-major:
// data[(b*H + y)*W + x].
struct SpectralCube {
    int height = 0, width = 0;
    std::vector<float> data;

    SpectralCube() = default;
    SpectralCube(int h, int w)
        : height(h), width(w),
          data(static_cast<std::size_t>(kBands) * h * w, 0.0f) {}

    std::int64_t index(int b, int y, int x) const {
        return (static_cast<std::int64_t>(b) * height + y) * width + x;
    }
    float& at(int b, int y, int x) { return data[index(b, y, x)]; }
    float at(int b, int y, int x) const { return data[index(b, y, x)]; }
};

// 3-channel image in [0,1], channel-major: data[(c*H + y)*W + x].
struct RgbImage {
    int height = 0, width = 0;
    std::vector<float> data;

    RgbImage() = default;
    RgbImage(int h, int w)
        : height(h), width(w), data(static_cast<std::size_t>(3) * h * w, 0.0f) {}

    std::int64_t index(int c, int y, int x) const {
        return (static_cast<std::int64_t>(c) * height + y) * width + x;
    }
    float& at(int c, int y, int x) { return data[index(c, y, x)]; }
    float at(int c, int y, int x) const { return data[index(c, y, x)]; }
};

// The 93-parameter band-to-RGB map: m[band][channel].
struct ResponseFunction {
    std::array<std::array<double, 3>, kBands> m{};
};

struct DegradeConfig {
    double noise_sigma = 0.01;
    bool mosaic = true;
    std::optional<int> quantize_bits = 8;

    void validate() const;
};

// RGB_c(p) = sum_k cube_k(p) * resp[k][c], clamped to [0,1].
RgbImage render_rgb(const SpectralCube& cube, const ResponseFunction& resp);

// Same projection without the clamp (metrics and linearity checks).
RgbImage render_rgb_linear(const SpectralCube& cube, const ResponseFunction& resp);

// Bayer RGGB subsample + bilinear demosaick, additive Gaussian noise,
// optional quantization, final clamp. Deterministic per seed.
RgbImage degrade_real_world(const RgbImage& rgb, const DegradeConfig& cfg, std::uint64_t seed);

// Piecewise-smooth Voronoi scene; each region carries a smooth positive
// spectrum (2-4 Gaussians over wavelength plus a ramp) scaled into [0,1].
SpectralCube gen_synthetic_scene(std::uint64_t seed, int height, int width);

// Three smooth Gaussian sensitivities near 610/540/470 nm, columns
// L1-normalized.
ResponseFunction default_response();

// Aligned random crop; size must divide by 8 and fit the image.
std::pair<RgbImage, SpectralCube> sample_patch(const RgbImage& rgb, const SpectralCube& cube,
                                               int size, Rng& rng);

// "HSC1" container: magic, u32 height/width/bands, f32 LE band-major data.
void save_cube(const SpectralCube& cube, const std::string& path);
SpectralCube load_cube(const std::string& path);

// RGB via 16-bit PNG (.png) or the HSC1 container with bands=3 (anything else).
void save_rgb(const RgbImage& img, const std::string& path);
RgbImage load_rgb(const std::string& path);

// CSV, 31 rows x 3 columns.
void save_response(const ResponseFunction& resp, const std::string& path);
ResponseFunction load_response(const std::string& path);

} // namespace hsr
