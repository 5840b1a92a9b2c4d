#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mmdec::data {

// Multichannel signal stored channel-major as 32-bit floats.
struct Timeseries {
  double rate = 0.0;
  std::vector<std::string> names;
  std::size_t samples = 0;
  std::vector<float> values;

  std::size_t channels() const { return names.size(); }
  std::span<const float> channel(std::size_t c) const { return {values.data() + c * samples, samples}; }
  std::span<float> channel(std::size_t c) { return {values.data() + c * samples, samples}; }
  double duration_seconds() const { return rate > 0.0 ? static_cast<double>(samples) / rate : 0.0; }

  // Throws mmdec::Error if the value count, names or rate are inconsistent.
  void validate() const;
  bool operator==(const Timeseries& other) const = default;
};

inline constexpr int kTimeseriesVersion = 1;

// Container: one JSON header line
//   {"version":1,"channels":C,"rate":R,"samples":S,"encoding":"f32le","names":[...]}
// terminated by '\n', followed by C*S little-endian floats, channel-major.
std::string encode_timeseries(const Timeseries& ts);
Timeseries decode_timeseries(std::string_view bytes, const std::string& source = "timeseries");

void write_timeseries(const std::filesystem::path& path, const Timeseries& ts);
Timeseries read_timeseries(const std::filesystem::path& path);

// Single-channel convenience wrapper.
Timeseries make_timeseries(std::vector<float> values, double rate, std::string name);

}  // namespace mmdec::data
