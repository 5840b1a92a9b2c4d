#include "mmdec/model/checkpoint.hpp"

#include "mmdec/common/binary_io.hpp"

namespace mmdec::model {

std::string encode_checkpoint(const DecoderParams<float>& params) {
  check_params(params);
  const auto& c = params.config;
  ByteWriter w;
  w.bytes(std::string_view(kCheckpointMagic, 4));
  w.u32(kCheckpointVersion);
  w.u32(c.feature_kind == FeatureKind::Envelope ? 0u : 1u);
  w.u32(static_cast<std::uint32_t>(c.eeg_channels));
  w.u32(static_cast<std::uint32_t>(c.hidden_channels));
  w.u32(static_cast<std::uint32_t>(c.kernel));
  w.u32(static_cast<std::uint32_t>(c.dilations.size()));
  for (const auto d : c.dilations) w.u32(static_cast<std::uint32_t>(d));
  w.f64(c.segment_seconds);
  w.f64(c.rate);

  const auto layout = parameter_layout(c);
  w.u32(static_cast<std::uint32_t>(layout.size()));
  for (std::size_t i = 0; i < layout.size(); ++i) {
    w.u32(static_cast<std::uint32_t>(layout[i].name.size()));
    w.bytes(layout[i].name);
    w.u32(static_cast<std::uint32_t>(layout[i].shape.size()));
    for (const auto dim : layout[i].shape) w.u32(static_cast<std::uint32_t>(dim));
    for (const float v : params.arrays[i].values()) w.f32(v);
  }
  return w.buffer();
}

DecoderParams<float> decode_checkpoint(std::string_view bytes, const std::string& source) {
  ByteReader r(bytes, source);
  if (r.bytes(4) != std::string_view(kCheckpointMagic, 4)) {
    throw DataError(source + ": not a decoder checkpoint (bad magic)");
  }
  if (const auto version = r.u32(); version != kCheckpointVersion) {
    throw DataError(source + ": unsupported checkpoint version " + std::to_string(version));
  }
  DecoderConfig c;
  const auto kind = r.u32();
  if (kind > 1) throw DataError(source + ": unknown feature kind " + std::to_string(kind));
  c.feature_kind = kind == 0 ? FeatureKind::Envelope : FeatureKind::EnvelopeModulations;
  c.eeg_channels = r.u32();
  c.hidden_channels = r.u32();
  c.kernel = r.u32();
  const auto n_layers = r.u32();
  if (n_layers > 64) throw DataError(source + ": implausible layer count " + std::to_string(n_layers));
  c.dilations.clear();
  for (std::uint32_t i = 0; i < n_layers; ++i) c.dilations.push_back(r.u32());
  c.segment_seconds = r.f64();
  c.rate = r.f64();
  try {
    c.validate();
  } catch (const Error& e) {
    throw DataError(source + ": " + e.what());
  }

  const auto layout = parameter_layout(c);
  const auto n_arrays = r.u32();
  if (n_arrays != layout.size()) {
    throw DataError(source + ": " + std::to_string(n_arrays) + " arrays stored, config implies " +
                    std::to_string(layout.size()));
  }
  DecoderParams<float> params{c, {}};
  for (const auto& spec : layout) {
    const auto name_len = r.u32();
    const auto name = r.bytes(name_len);
    if (name != spec.name) {
      throw DataError(source + ": expected array " + spec.name + ", found " + std::string(name));
    }
    const auto rank = r.u32();
    autodiff::Shape shape;
    for (std::uint32_t i = 0; i < rank && i < 8; ++i) shape.push_back(r.u32());
    if (shape != spec.shape) {
      throw DataError(source + ": array " + spec.name + " has shape " + autodiff::shape_string(shape) +
                      ", config implies " + autodiff::shape_string(spec.shape));
    }
    std::vector<float> values(autodiff::element_count(shape));
    for (auto& v : values) v = r.f32();
    params.arrays.emplace_back(shape, std::move(values));
  }
  if (r.remaining() != 0) {
    throw DataError(source + ": " + std::to_string(r.remaining()) + " trailing bytes");
  }
  return params;
}

void save_checkpoint(const DecoderParams<float>& params, const std::filesystem::path& path) {
  write_file_atomic(path, encode_checkpoint(params));
}

DecoderParams<float> load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path), path.string());
}

}  // namespace mmdec::model
