#include "hsr/model.hpp"

#include <cmath>

#include "hsr/checkpoint.hpp"

namespace hsr {

int ArchConfig::level_width(int level) const {
    // round(base_width * 2^level / den)
    const std::int64_t num = static_cast<std::int64_t>(base_width) << level;
    return static_cast<int>((2 * num + width_scale_den) / (2 * width_scale_den));
}

int ArchConfig::level_growth(int level) const {
    if (growth_rate > 0) return growth_rate;
    return std::max(4, level_width(level) / 2);
}

int ArchConfig::level_attention_hidden(int level) const {
    const int w = level_width(level);
    return w / std::min(attention_reduction, w);
}

void ArchConfig::validate() const {
    if (base_width < 1) throw ConfigError("arch: base_width must be positive");
    if (width_scale_den != 1 && width_scale_den != 2 && width_scale_den != 4 &&
        width_scale_den != 8)
        throw ConfigError("arch: width_scale must be one of 1, 1/2, 1/4, 1/8");
    if (in_channels < 1 || out_channels < 1)
        throw ConfigError("arch: channel counts must be positive");
    if (attention_reduction < 1) throw ConfigError("arch: attention_reduction must be positive");
    if (growth_rate < 0) throw ConfigError("arch: growth_rate must be >= 0");
    if (leaky_slope < 0.0 || leaky_slope >= 1.0)
        throw ConfigError("arch: leaky_slope must be in [0, 1)");
    for (int l = 0; l < kLevels; ++l) {
        const int w = level_width(l);
        if (w < 4)
            throw ConfigError("arch: level " + std::to_string(l) + " width " +
                              std::to_string(w) + " below the minimum of 4");
        if (l > 0 && w % 4 != 0)
            throw ConfigError("arch: level " + std::to_string(l) + " width " +
                              std::to_string(w) + " must divide by 4 for pixel shuffle");
        const auto [nd, ng] = blocks_per_level[l];
        if (nd < 0 || ng < 0 || nd + ng < 1)
            throw ConfigError("arch: each level needs at least one block");
    }
    for (int l = 0; l + 1 < kLevels; ++l) {
        const int upper = blocks_per_level[l].first + blocks_per_level[l].second;
        const int lower = blocks_per_level[l + 1].first + blocks_per_level[l + 1].second;
        if (upper < lower)
            throw ConfigError("arch: block counts must not increase towards the bottom level");
    }
}

std::vector<LayerSpec> enumerate_layers(const ArchConfig& arch) {
    arch.validate();
    std::vector<LayerSpec> layers;
    for (int l = 0; l < ArchConfig::kLevels; ++l) {
        const std::string lv = "level" + std::to_string(l);
        const int w = arch.level_width(l);
        const int g = arch.level_growth(l);
        const int unshuffled = arch.in_channels * (1 << l) * (1 << l);
        layers.push_back({lv + ".entry", unshuffled, w, 3, l, false});
        if (l < ArchConfig::kLevels - 1) {
            const int from_below = arch.level_width(l + 1) / 4;
            layers.push_back({lv + ".fuse", w + from_below, w, 3, l, false});
        }
        const auto [nd, ng] = arch.blocks_per_level[l];
        for (int i = 0; i < nd; ++i) {
            const std::string p = lv + ".resdb" + std::to_string(i);
            for (int j = 1; j <= 4; ++j)
                layers.push_back({p + ".conv" + std::to_string(j), w + (j - 1) * g, g, 3, l, false});
            layers.push_back({p + ".conv5", w + 4 * g, w, 3, l, false});
        }
        const int hidden = arch.level_attention_hidden(l);
        for (int i = 0; i < ng; ++i) {
            const std::string p = lv + ".resgb" + std::to_string(i);
            layers.push_back({p + ".conv1", w, w, 3, l, false});
            layers.push_back({p + ".conv2", w, w, 3, l, false});
            layers.push_back({p + ".fc1", w, hidden, 1, l, true});
            layers.push_back({p + ".fc2", hidden, w, 1, l, true});
        }
        if (l == ArchConfig::kLevels - 1)
            layers.push_back({lv + ".tone", w, w, 1, l, false});
    }
    layers.push_back({"output", arch.level_width(0), arch.out_channels, 3, 0, false});
    return layers;
}

template <typename T>
Tensor<T>& ModelParams<T>::require(const std::string& path, const Shape& expected) {
    auto it = tensors.find(path);
    if (it == tensors.end())
        throw ConfigError("params: missing tensor \"" + path + "\"");
    if (!(it->second.shape == expected))
        throw ConfigError("params: tensor \"" + path + "\" has shape " +
                          it->second.shape.str() + ", arch expects " + expected.str());
    return it->second;
}

template <typename T>
void ModelParams<T>::zero_grads() {
    for (auto& [path, t] : tensors) t.zero_grad();
}

template <typename T>
ModelParams<T> init_params(const ArchConfig& arch, std::uint64_t seed) {
    ModelParams<T> params;
    params.arch = arch;
    params.seed = seed;
    for (const LayerSpec& spec : enumerate_layers(arch)) {
        const Shape wshape{spec.out_c, spec.in_c, spec.k, spec.k};
        const double fan_in = static_cast<double>(spec.in_c) * spec.k * spec.k;
        const double fan_out = static_cast<double>(spec.out_c) * spec.k * spec.k;
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        Rng rng(mix_seed(seed, spec.path));
        Tensor<T> w(wshape);
        for (auto& v : w.data) v = static_cast<T>(rng.uniform(-bound, bound));
        w.requires_grad = true;
        Tensor<T> b(Shape{spec.out_c, 1, 1, 1});
        b.requires_grad = true;
        params.tensors.emplace(spec.path + ".weight", std::move(w));
        params.tensors.emplace(spec.path + ".bias", std::move(b));
    }
    return params;
}

namespace {

template <typename T>
struct ForwardBuilder {
    Graph<T>& g;
    ModelParams<T>& p;
    const ArchConfig& arch;
    T slope;

    NodeId conv(NodeId x, const std::string& path, int in_c, int out_c, int k,
                kernels::Act act) {
        Tensor<T>& w = p.require(path + ".weight", Shape{out_c, in_c, k, k});
        Tensor<T>& b = p.require(path + ".bias", Shape{out_c, 1, 1, 1});
        NodeId y = g.conv2d(x, g.leaf(&w), g.leaf(&b), 1, kernels::Pad::Reflect);
        return act == kernels::Act::Identity ? y : g.activation(y, act, slope);
    }

    NodeId fc(NodeId x, const std::string& path, int in_c, int out_c, kernels::Act act) {
        Tensor<T>& w = p.require(path + ".weight", Shape{out_c, in_c, 1, 1});
        Tensor<T>& b = p.require(path + ".bias", Shape{out_c, 1, 1, 1});
        NodeId y = g.linear(x, g.leaf(&w), g.leaf(&b));
        return g.activation(y, act, slope);
    }

    NodeId res_dense_block(NodeId x, const std::string& prefix, int w, int growth) {
        NodeId cat = x;
        int c = w;
        for (int j = 1; j <= 4; ++j) {
            NodeId o = conv(cat, prefix + ".conv" + std::to_string(j), c, growth, 3,
                            kernels::Act::LeakyRelu);
            cat = g.concat_channels(cat, o);
            c += growth;
        }
        NodeId o5 = conv(cat, prefix + ".conv5", c, w, 3, kernels::Act::Identity);
        return g.add(x, o5);
    }

    NodeId res_global_block(NodeId x, const std::string& prefix, int w, int hidden) {
        NodeId t = conv(x, prefix + ".conv1", w, w, 3, kernels::Act::LeakyRelu);
        t = conv(t, prefix + ".conv2", w, w, 3, kernels::Act::LeakyRelu);
        NodeId a = g.global_avg_pool(t);
        a = fc(a, prefix + ".fc1", w, hidden, kernels::Act::LeakyRelu);
        a = fc(a, prefix + ".fc2", hidden, w, kernels::Act::Sigmoid);
        return g.add(x, g.mul(t, a));
    }

    NodeId level_blocks(NodeId x, int level) {
        const std::string lv = "level" + std::to_string(level);
        const int w = arch.level_width(level);
        const int growth = arch.level_growth(level);
        const int hidden = arch.level_attention_hidden(level);
        const auto [nd, ng] = arch.blocks_per_level[level];
        for (int i = 0; i < std::max(nd, ng); ++i) {
            if (i < nd) x = res_dense_block(x, lv + ".resdb" + std::to_string(i), w, growth);
            if (i < ng) x = res_global_block(x, lv + ".resgb" + std::to_string(i), w, hidden);
        }
        return x;
    }
};

} // namespace

template <typename T>
NodeId hrnet_forward(Graph<T>& g, NodeId rgb, ModelParams<T>& params) {
    const ArchConfig& arch = params.arch;
    arch.validate();
    const Shape in = g.value(rgb).shape;
    if (in.c != arch.in_channels)
        throw ShapeError("hrnet: input has " + std::to_string(in.c) + " channels, expected " +
                         std::to_string(arch.in_channels));
    const int div = 1 << (ArchConfig::kLevels - 1);
    if (in.h % div != 0 || in.w % div != 0)
        throw ShapeError("hrnet: input " + std::to_string(in.h) + "x" + std::to_string(in.w) +
                         " must divide by " + std::to_string(div));

    ForwardBuilder<T> fb{g, params, arch, static_cast<T>(arch.leaky_slope)};

    std::array<NodeId, ArchConfig::kLevels> entry{};
    for (int l = 0; l < ArchConfig::kLevels; ++l) {
        NodeId x = l == 0 ? rgb : g.pixel_unshuffle(rgb, 1 << l);
        const int in_c = arch.in_channels * (1 << l) * (1 << l);
        entry[l] = fb.conv(x, "level" + std::to_string(l) + ".entry", in_c,
                           arch.level_width(l), 3, kernels::Act::LeakyRelu);
    }

    // Bottom level, then fuse upwards.
    NodeId x = fb.level_blocks(entry[3], 3);
    x = fb.conv(x, "level3.tone", arch.level_width(3), arch.level_width(3), 1,
                kernels::Act::LeakyRelu);
    NodeId carry = g.pixel_shuffle(x, 2);
    for (int l = 2; l >= 0; --l) {
        const int w = arch.level_width(l);
        const int from_below = arch.level_width(l + 1) / 4;
        x = g.concat_channels(entry[l], carry);
        x = fb.conv(x, "level" + std::to_string(l) + ".fuse", w + from_below, w, 3,
                    kernels::Act::LeakyRelu);
        x = fb.level_blocks(x, l);
        if (l > 0) carry = g.pixel_shuffle(x, 2);
    }
    return fb.conv(x, "output", arch.level_width(0), arch.out_channels, 3,
                   kernels::Act::Identity);
}

template <typename T>
Tensor<T> hrnet_infer(const Tensor<T>& rgb, ModelParams<T>& params) {
    Graph<T> g;
    Tensor<T> input = rgb;
    input.requires_grad = false;
    const NodeId out = hrnet_forward(g, g.constant(std::move(input)), params);
    return g.value(out);
}

template <typename T>
Tensor<T> res_dense_block(const Tensor<T>& x, ModelParams<T>& params,
                          const std::string& prefix, int width, int growth) {
    if (x.shape.c != width)
        throw ShapeError("res_dense_block: input has " + std::to_string(x.shape.c) +
                         " channels, block width is " + std::to_string(width));
    Graph<T> g;
    ForwardBuilder<T> fb{g, params, params.arch, static_cast<T>(params.arch.leaky_slope)};
    Tensor<T> input = x;
    input.requires_grad = false;
    return g.value(fb.res_dense_block(g.constant(std::move(input)), prefix, width, growth));
}

template <typename T>
Tensor<T> res_global_block(const Tensor<T>& x, ModelParams<T>& params,
                           const std::string& prefix, int width, int attention_reduction) {
    if (x.shape.c != width)
        throw ShapeError("res_global_block: input has " + std::to_string(x.shape.c) +
                         " channels, block width is " + std::to_string(width));
    if (width < attention_reduction)
        throw ConfigError("res_global_block: width " + std::to_string(width) +
                          " below attention_reduction " + std::to_string(attention_reduction));
    Graph<T> g;
    ForwardBuilder<T> fb{g, params, params.arch, static_cast<T>(params.arch.leaky_slope)};
    Tensor<T> input = x;
    input.requires_grad = false;
    return g.value(fb.res_global_block(g.constant(std::move(input)), prefix, width,
                                       width / attention_reduction));
}

ModelReport model_report(const ArchConfig& arch) {
    arch.validate();
    // Paper-resolution input, padded up to the level divisor like the CLI does.
    const int div = 1 << (ArchConfig::kLevels - 1);
    const int H = (482 + div - 1) / div * div; // 488
    const int W = (512 + div - 1) / div * div;
    ModelReport report;
    for (const LayerSpec& spec : enumerate_layers(arch)) {
        const std::int64_t weight_count =
            static_cast<std::int64_t>(spec.out_c) * spec.in_c * spec.k * spec.k;
        report.params += weight_count + spec.out_c;
        if (spec.is_fc) {
            report.macs += static_cast<std::int64_t>(spec.in_c) * spec.out_c;
        } else {
            const std::int64_t hw =
                (static_cast<std::int64_t>(H) >> spec.level) * (W >> spec.level);
            report.macs += hw * weight_count;
        }
    }
    report.weights_bytes = checkpoint_size_bytes(arch);
    return report;
}

#define HSR_MODEL_INSTANTIATE(T)                                                              \
    template struct ModelParams<T>;                                                          \
    template ModelParams<T> init_params<T>(const ArchConfig&, std::uint64_t);                \
    template NodeId hrnet_forward<T>(Graph<T>&, NodeId, ModelParams<T>&);                    \
    template Tensor<T> hrnet_infer<T>(const Tensor<T>&, ModelParams<T>&);                    \
    template Tensor<T> res_dense_block<T>(const Tensor<T>&, ModelParams<T>&,                 \
                                          const std::string&, int, int);                    \
    template Tensor<T> res_global_block<T>(const Tensor<T>&, ModelParams<T>&,                \
                                           const std::string&, int, int);

HSR_MODEL_INSTANTIATE(float)
HSR_MODEL_INSTANTIATE(double)

#undef HSR_MODEL_INSTANTIATE

} // namespace hsr
