#include "mmdec/data/timeseries_io.hpp"

#include <cmath>
#include "json.hpp"

#include "mmdec/common/binary_io.hpp"
#include "mmdec/common/error.hpp"

namespace mmdec::data {

using nlohmann::json;

void Timeseries::validate() const {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw Error("timeseries: rate must be positive");
  if (values.size() != names.size() * samples) {
    throw Error("timeseries: " + std::to_string(names.size()) + " channels x " + std::to_string(samples) +
                " samples needs " + std::to_string(names.size() * samples) + " values, got " +
                std::to_string(values.size()));
  }
}

std::string encode_timeseries(const Timeseries& ts) {
  ts.validate();
  const json header = {{"version", kTimeseriesVersion}, {"channels", ts.channels()}, {"rate", ts.rate},
                       {"samples", ts.samples},         {"encoding", "f32le"},      {"names", ts.names}};
  ByteWriter out;
  out.bytes(header.dump());
  out.bytes("\n");
  for (const float v : ts.values) out.f32(v);
  return out.buffer();
}

Timeseries decode_timeseries(std::string_view bytes, const std::string& source) {
  const auto newline = bytes.find('\n');
  if (newline == std::string_view::npos) throw DataError(source + ": missing header line");
  json header;
  try {
    header = json::parse(bytes.substr(0, newline));
  } catch (const json::exception& e) {
    throw DataError(source + ": malformed header: " + e.what());
  }
  Timeseries ts;
  try {
    if (header.at("version").get<int>() != kTimeseriesVersion) {
      throw DataError(source + ": unsupported version " + header.at("version").dump());
    }
    const auto encoding = header.at("encoding").get<std::string>();
    if (encoding != "f32le") throw DataError(source + ": unknown encoding '" + encoding + "'");
    ts.rate = header.at("rate").get<double>();
    ts.samples = header.at("samples").get<std::size_t>();
    ts.names = header.at("names").get<std::vector<std::string>>();
    if (header.at("channels").get<std::size_t>() != ts.names.size()) {
      throw DataError(source + ": header lists " + header.at("channels").dump() + " channels but " +
                      std::to_string(ts.names.size()) + " names");
    }
  } catch (const json::exception& e) {
    throw DataError(source + ": bad header field: " + e.what());
  }
  const std::size_t expected = ts.names.size() * ts.samples;
  const std::size_t payload = bytes.size() - newline - 1;
  if (payload != 4 * expected) {
    throw DataError(source + ": payload holds " + std::to_string(payload) + " bytes, expected " +
                    std::to_string(4 * expected) + " (" + std::to_string(ts.names.size()) + " channels x " +
                    std::to_string(ts.samples) + " samples)");
  }
  ByteReader in(bytes.substr(newline + 1), source);
  ts.values.resize(expected);
  for (auto& v : ts.values) v = in.f32();
  try {
    ts.validate();
  } catch (const Error& e) {
    throw DataError(source + ": " + e.what());
  }
  return ts;
}

void write_timeseries(const std::filesystem::path& path, const Timeseries& ts) {
  write_file_atomic(path, encode_timeseries(ts));
}

Timeseries read_timeseries(const std::filesystem::path& path) {
  return decode_timeseries(read_file(path), path.string());
}

Timeseries make_timeseries(std::vector<float> values, double rate, std::string name) {
  Timeseries ts;
  ts.rate = rate;
  ts.names = {std::move(name)};
  ts.samples = values.size();
  ts.values = std::move(values);
  return ts;
}

}  // namespace mmdec::data
