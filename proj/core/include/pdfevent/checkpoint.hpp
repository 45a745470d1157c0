#pragma once

#include <filesystem>

#include "pdfevent/model.hpp"

namespace pdfevent::checkpoint {

// Binary layout, all integers unsigned little-endian, reals IEEE-754 binary64
// little-endian:
//
//   magic       8 bytes  "PDFEVCKP"
//   version     u32      currently 1
//   in_channels u32
//   kernel_size u32
//   out_mode    u32      0 regression_2ch, 1 regression_1ch, 2 segmentation_2class
//   seed        u64
//   levels      u32, then `levels` x u32 hidden channel counts
//   tensors     u32 count, then per tensor:
//                 name_len u32, name bytes (UTF-8),
//                 rank u32, rank x u64 dims,
//                 value_count u64, value_count x f64
inline constexpr std::uint32_t kFormatVersion = 1;

struct Checkpoint {
  model::ModelConfig config;
  model::Parameters params;
};

void save(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load(const std::filesystem::path& path);

}  // namespace pdfevent::checkpoint
