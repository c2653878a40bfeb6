#include "hsr/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hsr/png_io.hpp"

namespace hsr {

namespace {

constexpr char kCubeMagic[4] = {'H', 'S', 'C', '1'};

void write_u32_le(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32_le(std::istream& in, const std::string& path, std::int64_t offset) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (in.gcount() != 4)
        throw FormatError(path + ": truncated header at byte offset " + std::to_string(offset));
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f32_le(std::ostream& out, const float* data, std::size_t count) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 4));
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            std::uint32_t v;
            std::memcpy(&v, &data[i], 4);
            write_u32_le(out, v);
        }
    }
}

void read_f32_le(std::istream& in, float* data, std::size_t count, const std::string& path,
                 std::int64_t payload_offset) {
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * 4));
    const auto got = static_cast<std::int64_t>(in.gcount());
    const auto want = static_cast<std::int64_t>(count) * 4;
    if (got != want)
        throw FormatError(path + ": truncated payload at byte offset " +
                          std::to_string(payload_offset + got) + ", missing " +
                          std::to_string(want - got) + " bytes");
    if constexpr (std::endian::native != std::endian::little) {
        for (std::size_t i = 0; i < count; ++i) {
            std::uint32_t v;
            std::memcpy(&v, &data[i], 4);
            v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
            std::memcpy(&data[i], &v, 4);
        }
    }
}

void save_container(const float* data, int h, int w, int bands, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out.write(kCubeMagic, 4);
    write_u32_le(out, static_cast<std::uint32_t>(h));
    write_u32_le(out, static_cast<std::uint32_t>(w));
    write_u32_le(out, static_cast<std::uint32_t>(bands));
    write_f32_le(out, data, static_cast<std::size_t>(h) * w * bands);
    if (!out) throw FormatError("write failed: " + path);
}

void load_container(const std::string& path, int expected_bands, std::vector<float>& data,
                    int& h, int& w) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kCubeMagic, 4) != 0)
        throw FormatError(path + ": bad magic at byte offset 0 (expected \"HSC1\")");
    h = static_cast<int>(read_u32_le(in, path, 4));
    w = static_cast<int>(read_u32_le(in, path, 8));
    const int bands = static_cast<int>(read_u32_le(in, path, 12));
    if (bands != expected_bands)
        throw FormatError(path + ": expected " + std::to_string(expected_bands) +
                          " bands, file has " + std::to_string(bands));
    if (h <= 0 || w <= 0) throw FormatError(path + ": invalid dimensions");
    data.resize(static_cast<std::size_t>(h) * w * bands);
    read_f32_le(in, data.data(), data.size(), path, 16);
}

} // namespace

void DegradeConfig::validate() const {
    if (noise_sigma < 0.0) throw ConfigError("degrade: noise_sigma must be >= 0");
    if (quantize_bits && (*quantize_bits < 8 || *quantize_bits > 16))
        throw ConfigError("degrade: quantize_bits must be in [8,16]");
}

RgbImage render_rgb_linear(const SpectralCube& cube, const ResponseFunction& resp) {
    RgbImage img(cube.height, cube.width);
    const int H = cube.height, W = cube.width;
    for (int c = 0; c < 3; ++c) {
#pragma omp parallel for
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                double s = 0.0;
                for (int b = 0; b < kBands; ++b)
                    s += static_cast<double>(cube.at(b, y, x)) * resp.m[b][c];
                img.at(c, y, x) = static_cast<float>(s);
            }
        }
    }
    return img;
}

RgbImage render_rgb(const SpectralCube& cube, const ResponseFunction& resp) {
    RgbImage img = render_rgb_linear(cube, resp);
    for (auto& v : img.data) v = std::clamp(v, 0.0f, 1.0f);
    return img;
}

namespace {

// Bilinear demosaick of an RGGB mosaic: (even y, even x) -> R,
// (odd y, odd x) -> B, rest -> G. Out-of-range neighbors reflect one step
// inward, which preserves site parity, so a constant field reproduces
// itself exactly.
RgbImage demosaick_rggb(const RgbImage& src) {
    const int H = src.height, W = src.width;
    if (H < 2 || W < 2) return src;
    auto mosaic_at = [&](int y, int x) -> float {
        const int c = (y % 2 == 0) ? (x % 2 == 0 ? 0 : 1) : (x % 2 == 0 ? 1 : 2);
        return src.at(c, y, x);
    };
    auto up = [&](int y) { return y > 0 ? y - 1 : y + 1; };
    auto down = [&](int y) { return y + 1 < H ? y + 1 : y - 1; };
    auto left = [&](int x) { return x > 0 ? x - 1 : x + 1; };
    auto right = [&](int x) { return x + 1 < W ? x + 1 : x - 1; };

    RgbImage out(H, W);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const bool ye = y % 2 == 0, xe = x % 2 == 0;
            float r, g, b;
            if (ye && xe) { // red site
                r = mosaic_at(y, x);
                g = 0.25f * (mosaic_at(up(y), x) + mosaic_at(down(y), x) +
                             mosaic_at(y, left(x)) + mosaic_at(y, right(x)));
                b = 0.25f * (mosaic_at(up(y), left(x)) + mosaic_at(up(y), right(x)) +
                             mosaic_at(down(y), left(x)) + mosaic_at(down(y), right(x)));
            } else if (!ye && !xe) { // blue site
                b = mosaic_at(y, x);
                g = 0.25f * (mosaic_at(up(y), x) + mosaic_at(down(y), x) +
                             mosaic_at(y, left(x)) + mosaic_at(y, right(x)));
                r = 0.25f * (mosaic_at(up(y), left(x)) + mosaic_at(up(y), right(x)) +
                             mosaic_at(down(y), left(x)) + mosaic_at(down(y), right(x)));
            } else if (ye) { // green site on a red row
                g = mosaic_at(y, x);
                r = 0.5f * (mosaic_at(y, left(x)) + mosaic_at(y, right(x)));
                b = 0.5f * (mosaic_at(up(y), x) + mosaic_at(down(y), x));
            } else { // green site on a blue row
                g = mosaic_at(y, x);
                b = 0.5f * (mosaic_at(y, left(x)) + mosaic_at(y, right(x)));
                r = 0.5f * (mosaic_at(up(y), x) + mosaic_at(down(y), x));
            }
            out.at(0, y, x) = r;
            out.at(1, y, x) = g;
            out.at(2, y, x) = b;
        }
    }
    return out;
}

} // namespace

RgbImage degrade_real_world(const RgbImage& rgb, const DegradeConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    RgbImage out = cfg.mosaic ? demosaick_rggb(rgb) : rgb;
    if (cfg.noise_sigma > 0.0) {
        Rng rng(mix_seed(seed, "degrade-noise"));
        for (auto& v : out.data) v = static_cast<float>(v + cfg.noise_sigma * rng.gaussian());
    }
    if (cfg.quantize_bits) {
        const float q = static_cast<float>((1u << *cfg.quantize_bits) - 1u);
        for (auto& v : out.data) v = std::round(v * q) / q;
    }
    for (auto& v : out.data) v = std::clamp(v, 0.0f, 1.0f);
    return out;
}

SpectralCube gen_synthetic_scene(std::uint64_t seed, int height, int width) {
    if (height < 16 || width < 16)
        throw ConfigError("gen_synthetic_scene: size must be at least 16x16");
    Rng rng(mix_seed(seed, "scene"));

    const int regions = rng.range_int(5, 20);
    std::vector<double> site_y(regions), site_x(regions);
    for (int k = 0; k < regions; ++k) {
        site_y[k] = rng.uniform(0.0, static_cast<double>(height));
        site_x[k] = rng.uniform(0.0, static_cast<double>(width));
    }

    // One smooth spectrum per region: 2-4 Gaussians over wavelength plus a
    // strictly positive ramp, then scaled so the peak lands in (0,1) and the
    // discrete total variation stays small (keeps bands smooth).
    std::vector<std::array<double, kBands>> spectra(regions);
    for (int k = 0; k < regions; ++k) {
        const int ng = rng.range_int(2, 4);
        std::array<double, kBands> f{};
        std::vector<double> center(ng), sigma(ng), amp(ng);
        for (int gi = 0; gi < ng; ++gi) {
            center[gi] = rng.uniform(400.0, 700.0);
            sigma[gi] = rng.uniform(25.0, 90.0);
            amp[gi] = rng.uniform(0.1, 1.0);
        }
        const double ramp_a = rng.uniform(0.2, 0.45);
        const double ramp_b = rng.uniform(-0.5, 0.5) * ramp_a;
        for (int b = 0; b < kBands; ++b) {
            const double lambda = band_center_nm(b);
            const double t = (lambda - kBandStartNm) / 300.0;
            double v = ramp_a + ramp_b * t;
            for (int gi = 0; gi < ng; ++gi) {
                const double d = (lambda - center[gi]) / sigma[gi];
                v += amp[gi] * std::exp(-0.5 * d * d);
            }
            f[b] = v;
        }
        double peak = 0.0, tv = 0.0;
        for (int b = 0; b < kBands; ++b) peak = std::max(peak, f[b]);
        for (int b = 0; b + 1 < kBands; ++b) tv += std::abs(f[b + 1] - f[b]);
        const double target_peak = rng.uniform(0.25, 0.95);
        double scale = target_peak / peak;
        if (tv > 0.0) scale = std::min(scale, 2.4 / tv);
        for (auto& v : f) v *= scale;
        spectra[k] = f;
    }

    SpectralCube cube(height, width);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            int best = 0;
            double best_d = 1e300;
            for (int k = 0; k < regions; ++k) {
                const double dy = site_y[k] - (y + 0.5), dx = site_x[k] - (x + 0.5);
                const double d = dy * dy + dx * dx;
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            for (int b = 0; b < kBands; ++b)
                cube.at(b, y, x) = static_cast<float>(spectra[best][b]);
        }
    }
    return cube;
}

ResponseFunction default_response() {
    constexpr double centers[3] = {610.0, 540.0, 470.0};
    constexpr double sigmas[3] = {45.0, 40.0, 35.0};
    ResponseFunction resp;
    for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (int b = 0; b < kBands; ++b) {
            const double d = (band_center_nm(b) - centers[c]) / sigmas[c];
            resp.m[b][c] = std::exp(-0.5 * d * d);
            sum += resp.m[b][c];
        }
        for (int b = 0; b < kBands; ++b) resp.m[b][c] /= sum;
    }
    return resp;
}

std::pair<RgbImage, SpectralCube> sample_patch(const RgbImage& rgb, const SpectralCube& cube,
                                               int size, Rng& rng) {
    if (rgb.height != cube.height || rgb.width != cube.width)
        throw ShapeError("sample_patch: RGB and cube dimensions differ");
    if (size % 8 != 0)
        throw ShapeError("sample_patch: size " + std::to_string(size) + " not divisible by 8");
    if (size > std::min(rgb.height, rgb.width))
        throw ShapeError("sample_patch: size " + std::to_string(size) + " exceeds image " +
                         std::to_string(rgb.height) + "x" + std::to_string(rgb.width));
    const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(rgb.height - size + 1)));
    const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(rgb.width - size + 1)));

    RgbImage rout(size, size);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < size; ++y)
            std::memcpy(&rout.at(c, y, 0), &rgb.at(c, y0 + y, x0), sizeof(float) * size);
    SpectralCube cout(size, size);
    for (int b = 0; b < kBands; ++b)
        for (int y = 0; y < size; ++y)
            std::memcpy(&cout.at(b, y, 0), &cube.at(b, y0 + y, x0), sizeof(float) * size);
    return {std::move(rout), std::move(cout)};
}

void save_cube(const SpectralCube& cube, const std::string& path) {
    save_container(cube.data.data(), cube.height, cube.width, kBands, path);
}

SpectralCube load_cube(const std::string& path) {
    SpectralCube cube;
    load_container(path, kBands, cube.data, cube.height, cube.width);
    return cube;
}

void save_rgb(const RgbImage& img, const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".png") == 0)
        png_write_rgb16(img, path);
    else
        save_container(img.data.data(), img.height, img.width, 3, path);
}

RgbImage load_rgb(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".png") == 0)
        return png_read_rgb(path);
    RgbImage img;
    load_container(path, 3, img.data, img.height, img.width);
    return img;
}

void save_response(const ResponseFunction& resp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out.precision(17);
    for (int b = 0; b < kBands; ++b)
        out << resp.m[b][0] << "," << resp.m[b][1] << "," << resp.m[b][2] << "\n";
    if (!out) throw FormatError("write failed: " + path);
}

ResponseFunction load_response(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open: " + path);
    ResponseFunction resp;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (row >= kBands)
            throw FormatError(path + ": more than " + std::to_string(kBands) + " rows");
        std::istringstream ss(line);
        std::string cell;
        for (int c = 0; c < 3; ++c) {
            if (!std::getline(ss, cell, c < 2 ? ',' : '\n'))
                throw FormatError(path + ": row " + std::to_string(row) + " has fewer than 3 columns");
            try {
                resp.m[row][c] = std::stod(cell);
            } catch (const std::exception&) {
                throw FormatError(path + ": row " + std::to_string(row) + " bad number: " + cell);
            }
            if (!std::isfinite(resp.m[row][c]))
                throw FormatError(path + ": row " + std::to_string(row) + " non-finite value");
        }
        ++row;
    }
    if (row != kBands)
        throw FormatError(path + ": expected " + std::to_string(kBands) + " rows, got " +
                          std::to_string(row));
    for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (int b = 0; b < kBands; ++b) sum += resp.m[b][c];
        if (!(sum > 0.0)) throw FormatError(path + ": column " + std::to_string(c) + " sums to " +
                                            std::to_string(sum) + ", must be positive");
    }
    return resp;
}

} // namespace hsr
