#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hsr/graph.hpp"

namespace hsr {

// 4-level hierarchy. Level 0 is the top (full resolution); level l sees the
// input pixel-unshuffled by 2^l. Widths follow base_width * 2^l, scaled by
// width_scale = 1/width_scale_den.
struct ArchConfig {
    static constexpr int kLevels = 4;

    int base_width = 64;
    int width_scale_den = 1; // one of 1, 2, 4, 8
    // (residual dense blocks, residual global blocks) per level, top first.
    // The top level carries the most blocks.
    std::array<std::pair<int, int>, kLevels> blocks_per_level{{{2, 2}, {1, 1}, {1, 1}, {1, 1}}};
    int growth_rate = 0;          // 0 = auto: max(4, level_width/2)
    int attention_reduction = 16; // clamped per level to the level width
    double leaky_slope = 0.2;
    int in_channels = 3;
    int out_channels = 31;

    int level_width(int level) const;
    int level_growth(int level) const;
    int level_attention_hidden(int level) const;
    void validate() const; // ConfigError on violations
};

// One conv or fully-connected layer of the network; the single source of
// truth shared by init, forward, serialization and the report.
struct LayerSpec {
    std::string path; // e.g. "level2.resdb0.conv3"
    int in_c = 0, out_c = 0, k = 1;
    int level = 0;     // spatial level the layer runs at
    bool is_fc = false;
};

std::vector<LayerSpec> enumerate_layers(const ArchConfig& arch);

template <typename T>
struct ModelParams {
    ArchConfig arch;
    std::uint64_t seed = 0;
    std::map<std::string, Tensor<T>> tensors;

    Tensor<T>& require(const std::string& path, const Shape& expected);
    void zero_grads();
};

// Xavier-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases.
// Bit-deterministic per (seed, path), independent of enumeration order.
template <typename T>
ModelParams<T> init_params(const ArchConfig& arch, std::uint64_t seed);

// Records the whole network onto the graph; rgb must already be a node of
// shape (N, 3, H, W) with H, W divisible by 8. Returns the (N, 31, H, W)
// output node (identity activation, unbounded).
template <typename T>
NodeId hrnet_forward(Graph<T>& g, NodeId rgb, ModelParams<T>& params);

// Convenience one-shot forward on a private graph.
template <typename T>
Tensor<T> hrnet_infer(const Tensor<T>& rgb, ModelParams<T>& params);

// Single blocks on a private graph. prefix names the parameter subtree
// (e.g. "level0.resdb0"); params must hold matching tensors.
template <typename T>
Tensor<T> res_dense_block(const Tensor<T>& x, ModelParams<T>& params,
                          const std::string& prefix, int width, int growth);

// hidden = width / attention_reduction; width below the reduction is a
// ConfigError. (The arch builder instead clamps the reduction per level so
// narrow variants stay valid.)
template <typename T>
Tensor<T> res_global_block(const Tensor<T>& x, ModelParams<T>& params,
                           const std::string& prefix, int width, int attention_reduction);

struct ModelReport {
    std::int64_t macs = 0;          // one 482x512 forward (padded to 488x512)
    std::int64_t params = 0;        // scalar parameter count
    std::int64_t weights_bytes = 0; // serialized checkpoint size
};

// Analytic counts; no forward pass. MACs cover conv and linear multiplies.
ModelReport model_report(const ArchConfig& arch);

} // namespace hsr
