#include "mmdec/eeg/layout.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include "mmdec/common/error.hpp"

namespace mmdec::eeg {

double dot(const Position& a, const Position& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

double norm(const Position& p) { return std::sqrt(dot(p, p)); }

Position normalized(const Position& p) {
  const double n = norm(p);
  if (n == 0.0) throw Error("electrode position at the origin cannot be projected to the sphere");
  return {p.x / n, p.y / n, p.z / n};
}

double angular_distance(const Position& a, const Position& b) {
  return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}

ChannelLayout::ChannelLayout(std::vector<std::string> names, std::vector<Position> positions)
    : names_(std::move(names)), positions_(std::move(positions)) {
  if (names_.size() != positions_.size()) {
    throw Error("channel layout: " + std::to_string(names_.size()) + " names but " +
                std::to_string(positions_.size()) + " positions");
  }
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!seen.insert(names_[i]).second) throw Error("channel layout: duplicate channel " + names_[i]);
    if (std::abs(norm(positions_[i]) - 1.0) > 1e-6) {
      throw Error("channel layout: position of " + names_[i] + " is not on the unit sphere");
    }
  }
}

std::optional<std::size_t> ChannelLayout::index_of(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

ChannelLayout ChannelLayout::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open layout file " + path.string());
  std::vector<std::string> names;
  std::vector<Position> positions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string name;
    if (!(fields >> name)) continue;
    Position p{};
    if (!(fields >> p.x >> p.y >> p.z)) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 'name x y z'");
    }
    names.push_back(name);
    positions.push_back(normalized(p));
  }
  return ChannelLayout(std::move(names), std::move(positions));
}

void ChannelLayout::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write layout file " + path.string());
  out << std::setprecision(9) << std::fixed;
  for (std::size_t i = 0; i < size(); ++i) {
    out << names_[i] << ' ' << positions_[i].x << ' ' << positions_[i].y << ' ' << positions_[i].z << '\n';
  }
}

ChannelLayout ChannelLayout::resolve(std::string_view name_or_path) {
  if (name_or_path == "biosemi64") return biosemi64();
  if (name_or_path == "icl63") return icl63();
  return read(std::filesystem::path(name_or_path));
}

bool ChannelLayout::operator==(const ChannelLayout& other) const {
  if (names_ != other.names_) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto& a = positions_[i];
    const auto& b = other.positions_[i];
    if (a.x != b.x || a.y != b.y || a.z != b.z) return false;
  }
  return true;
}

}  // namespace mmdec::eeg
