#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mmdec::eeg {

struct Position {
  double x;
  double y;
  double z;
};

double dot(const Position& a, const Position& b);
double norm(const Position& p);
Position normalized(const Position& p);
// Great-circle angle between two unit vectors, radians.
double angular_distance(const Position& a, const Position& b);

// Ordered electrode labels with unit-sphere coordinates (10-20 system).
class ChannelLayout {
 public:
  ChannelLayout() = default;
  // Throws mmdec::Error on duplicate names or positions that are not unit-norm.
  ChannelLayout(std::vector<std::string> names, std::vector<Position> positions);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Position>& positions() const { return positions_; }
  const std::string& name(std::size_t i) const { return names_[i]; }
  const Position& position(std::size_t i) const { return positions_[i]; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  bool contains(std::string_view name) const { return index_of(name).has_value(); }

  // 64-channel BioSemi cap.
  static ChannelLayout biosemi64();
  // 63-electrode cap without Fpz, Iz, P9, P10, PO4 and with FT9, FT10, TP9, TP10.
  static ChannelLayout icl63();

  // Plain text, one channel per line: name x y z. '#' starts a comment.
  // Coordinates are projected onto the unit sphere on reading.
  static ChannelLayout read(const std::filesystem::path& path);
  void write(const std::filesystem::path& path) const;

  // Built-in name ("biosemi64", "icl63") or a layout file path.
  static ChannelLayout resolve(std::string_view name_or_path);

  bool operator==(const ChannelLayout& other) const;

 private:
  std::vector<std::string> names_;
  std::vector<Position> positions_;
};

}  // namespace mmdec::eeg
