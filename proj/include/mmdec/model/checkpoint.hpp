#pragma once

#include <filesystem>
#include <string>

#include "mmdec/model/decoder.hpp"

namespace mmdec::model {

// Checkpoint container, all fields little-endian:
//   "MMD1" | u32 version | u32 feature kind | u32 eeg channels | u32 hidden
//   | u32 kernel | u32 layer count | u32 dilation per layer | f64 segment
//   seconds | f64 rate | u32 array count | per array: u32 name length, name,
//   u32 rank, u32 dims, f32 payload.
inline constexpr char kCheckpointMagic[] = "MMD1";
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string encode_checkpoint(const DecoderParams<float>& params);
DecoderParams<float> decode_checkpoint(std::string_view bytes, const std::string& source = "checkpoint");

void save_checkpoint(const DecoderParams<float>& params, const std::filesystem::path& path);
DecoderParams<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace mmdec::model
