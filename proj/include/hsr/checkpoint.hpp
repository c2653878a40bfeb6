#pragma once

#include <string>

#include "hsr/model.hpp"

namespace hsr {

// "HRCK" checkpoint container, little-endian throughout:
//
//   offset  size  field
//   0       4     magic "HRCK"
//   4       4     u32 format version (1)
//   8       8     u64 init seed
//   16      4     u32 base_width
//   20      4     u32 width_scale_den
//   24      4     u32 levels (4)
//   28      32    4 x (u32 num_resdb, u32 num_resgb)
//   60      4     u32 growth_rate (0 = auto)
//   64      4     u32 attention_reduction
//   68      8     f64 leaky_slope
//   76      4     u32 in_channels
//   80      4     u32 out_channels
//   84      4     u32 tensor count
//   88      ...   records, sorted by path:
//                   u32 path length, path bytes (UTF-8),
//                   4 x u32 shape (N,C,H,W), f32 values
//
// Values are stored as 32-bit floats; float checkpoints round-trip
// bit-exactly, double params are narrowed on save.
template <typename T>
void save_checkpoint(const ModelParams<T>& params, const std::string& path);

template <typename T>
ModelParams<T> load_checkpoint(const std::string& path);

// Analytic file size for an architecture (used by model_report).
std::int64_t checkpoint_size_bytes(const ArchConfig& arch);

} // namespace hsr
