#include "hsr/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace hsr {

namespace {

constexpr char kMagic[4] = {'H', 'R', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    put_u32(out, static_cast<std::uint32_t>(v));
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

struct Reader {
    std::ifstream in;
    std::string path;
    std::int64_t offset = 0;

    explicit Reader(const std::string& p) : in(p, std::ios::binary), path(p) {
        if (!in) throw FormatError("cannot open: " + p);
    }

    void bytes(void* dst, std::int64_t count, const char* what) {
        in.read(static_cast<char*>(dst), count);
        if (in.gcount() != count)
            throw FormatError(path + ": truncated while reading " + std::string(what) +
                              " at byte offset " + std::to_string(offset + in.gcount()) +
                              ", missing " + std::to_string(count - in.gcount()) + " bytes");
        offset += count;
    }

    std::uint32_t u32(const char* what) {
        unsigned char b[4];
        bytes(b, 4, what);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }

    std::uint64_t u64(const char* what) {
        const std::uint64_t lo = u32(what);
        return lo | (static_cast<std::uint64_t>(u32(what)) << 32);
    }

    double f64(const char* what) {
        const std::uint64_t bits = u64(what);
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
};

void put_f32_values(std::ostream& out, const float* data, std::size_t count) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 4));
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            std::uint32_t v;
            std::memcpy(&v, &data[i], 4);
            put_u32(out, v);
        }
    }
}

} // namespace

template <typename T>
void save_checkpoint(const ModelParams<T>& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path);
    const ArchConfig& a = params.arch;
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u64(out, params.seed);
    put_u32(out, static_cast<std::uint32_t>(a.base_width));
    put_u32(out, static_cast<std::uint32_t>(a.width_scale_den));
    put_u32(out, ArchConfig::kLevels);
    for (const auto& [nd, ng] : a.blocks_per_level) {
        put_u32(out, static_cast<std::uint32_t>(nd));
        put_u32(out, static_cast<std::uint32_t>(ng));
    }
    put_u32(out, static_cast<std::uint32_t>(a.growth_rate));
    put_u32(out, static_cast<std::uint32_t>(a.attention_reduction));
    put_f64(out, a.leaky_slope);
    put_u32(out, static_cast<std::uint32_t>(a.in_channels));
    put_u32(out, static_cast<std::uint32_t>(a.out_channels));
    put_u32(out, static_cast<std::uint32_t>(params.tensors.size()));

    std::vector<float> f32buf;
    for (const auto& [name, tensor] : params.tensors) {
        put_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_u32(out, static_cast<std::uint32_t>(tensor.shape.n));
        put_u32(out, static_cast<std::uint32_t>(tensor.shape.c));
        put_u32(out, static_cast<std::uint32_t>(tensor.shape.h));
        put_u32(out, static_cast<std::uint32_t>(tensor.shape.w));
        if constexpr (std::is_same_v<T, float>) {
            put_f32_values(out, tensor.data.data(), tensor.data.size());
        } else {
            f32buf.resize(tensor.data.size());
            for (std::size_t i = 0; i < tensor.data.size(); ++i)
                f32buf[i] = static_cast<float>(tensor.data[i]);
            put_f32_values(out, f32buf.data(), f32buf.size());
        }
    }
    if (!out) throw FormatError("write failed: " + path);
}

template <typename T>
ModelParams<T> load_checkpoint(const std::string& path) {
    Reader r(path);
    char magic[4];
    r.bytes(magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError(path + ": bad magic at byte offset 0 (expected \"HRCK\")");
    const std::uint32_t version = r.u32("version");
    if (version != kVersion)
        throw FormatError(path + ": unsupported format version " + std::to_string(version));

    ModelParams<T> params;
    params.seed = r.u64("seed");
    ArchConfig& a = params.arch;
    a.base_width = static_cast<int>(r.u32("base_width"));
    a.width_scale_den = static_cast<int>(r.u32("width_scale_den"));
    const std::uint32_t levels = r.u32("levels");
    if (levels != ArchConfig::kLevels)
        throw FormatError(path + ": expected " + std::to_string(ArchConfig::kLevels) +
                          " levels, file has " + std::to_string(levels));
    for (auto& [nd, ng] : a.blocks_per_level) {
        nd = static_cast<int>(r.u32("blocks"));
        ng = static_cast<int>(r.u32("blocks"));
    }
    a.growth_rate = static_cast<int>(r.u32("growth_rate"));
    a.attention_reduction = static_cast<int>(r.u32("attention_reduction"));
    a.leaky_slope = r.f64("leaky_slope");
    a.in_channels = static_cast<int>(r.u32("in_channels"));
    a.out_channels = static_cast<int>(r.u32("out_channels"));
    a.validate();

    const std::uint32_t count = r.u32("tensor count");
    std::vector<float> f32buf;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t len = r.u32("path length");
        std::string name(len, '\0');
        r.bytes(name.data(), len, "path");
        Shape shape;
        shape.n = static_cast<int>(r.u32("shape"));
        shape.c = static_cast<int>(r.u32("shape"));
        shape.h = static_cast<int>(r.u32("shape"));
        shape.w = static_cast<int>(r.u32("shape"));
        if (shape.numel() <= 0)
            throw FormatError(path + ": tensor \"" + name + "\" has invalid shape " + shape.str());
        Tensor<T> t(shape);
        t.requires_grad = true;
        f32buf.resize(static_cast<std::size_t>(shape.numel()));
        r.bytes(f32buf.data(), static_cast<std::int64_t>(f32buf.size()) * 4, name.c_str());
        if constexpr (std::endian::native != std::endian::little) {
            for (auto& f : f32buf) {
                std::uint32_t v;
                std::memcpy(&v, &f, 4);
                v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
                std::memcpy(&f, &v, 4);
            }
        }
        for (std::size_t j = 0; j < f32buf.size(); ++j) t.data[j] = static_cast<T>(f32buf[j]);
        params.tensors.emplace(std::move(name), std::move(t));
    }

    // The stored tensor set must exactly match the declared architecture.
    const auto layers = enumerate_layers(a);
    if (params.tensors.size() != layers.size() * 2)
        throw FormatError(path + ": tensor count " + std::to_string(params.tensors.size()) +
                          " does not match architecture (" + std::to_string(layers.size() * 2) +
                          ")");
    for (const LayerSpec& spec : layers) {
        params.require(spec.path + ".weight", Shape{spec.out_c, spec.in_c, spec.k, spec.k});
        params.require(spec.path + ".bias", Shape{spec.out_c, 1, 1, 1});
    }
    return params;
}

std::int64_t checkpoint_size_bytes(const ArchConfig& arch) {
    std::int64_t size = 4 + 4 + 8 + 4 + 4 + 4 + 32 + 4 + 4 + 8 + 4 + 4 + 4;
    for (const LayerSpec& spec : enumerate_layers(arch)) {
        const std::int64_t weight_count =
            static_cast<std::int64_t>(spec.out_c) * spec.in_c * spec.k * spec.k;
        size += 4 + static_cast<std::int64_t>(spec.path.size()) + 7 + 16 + 4 * weight_count;
        size += 4 + static_cast<std::int64_t>(spec.path.size()) + 5 + 16 + 4 * spec.out_c;
    }
    return size;
}

} // namespace hsr

namespace hsr {

template void save_checkpoint<float>(const ModelParams<float>&, const std::string&);
template void save_checkpoint<double>(const ModelParams<double>&, const std::string&);
template ModelParams<float> load_checkpoint<float>(const std::string&);
template ModelParams<double> load_checkpoint<double>(const std::string&);

} // namespace hsr
