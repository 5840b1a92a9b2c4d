#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mmdec/autodiff/tensor.hpp"
#include "mmdec/signal/features.hpp"

namespace mmdec::model {

using signal::FeatureKind;

struct DecoderConfig {
  FeatureKind feature_kind = FeatureKind::Envelope;
  std::size_t eeg_channels = 64;
  std::size_t hidden_channels = 16;  // L
  std::size_t kernel = 3;
  std::vector<std::size_t> dilations = {1, 3, 9};
  double segment_seconds = 3.0;
  double rate = 64.0;

  // Default configuration for a feature kind (64 Hz envelope, 512 Hz FFR).
  static DecoderConfig for_kind(FeatureKind kind);

  std::size_t layers() const { return dilations.size(); }
  std::size_t segment_samples() const;
  // Input samples that influence one projected sample.
  std::size_t receptive_field() const;
  // Throws mmdec::Error when the configuration is unusable.
  void validate() const;

  bool operator==(const DecoderConfig& other) const = default;
};

struct ReceptiveField {
  std::size_t samples;
  double seconds;
};

ReceptiveField receptive_field(const DecoderConfig& config);

// One learnable array of the decoder.
struct ParamSpec {
  std::string name;
  autodiff::Shape shape;
  std::size_t fan_in;
  std::size_t fan_out;
  bool is_bias;
};

// Arrays in storage order: EEG module (separable layer: spatial, temporal,
// bias; then weight/bias per dense layer), stimulus module (weight/bias per
// layer), readout.
std::vector<ParamSpec> parameter_layout(const DecoderConfig& config);
std::size_t parameter_count(const DecoderConfig& config);

// Indices into the storage order.
struct ParamIndex {
  static constexpr std::size_t kEegSpatial = 0;
  static constexpr std::size_t kEegTemporal = 1;
  static constexpr std::size_t kEegBias0 = 2;
  static std::size_t eeg_weight(std::size_t layer) { return 3 + 2 * (layer - 1); }
  static std::size_t eeg_bias(std::size_t layer) { return layer == 0 ? kEegBias0 : 4 + 2 * (layer - 1); }
  static std::size_t stim_weight(std::size_t layers, std::size_t layer) { return 2 * layers + 1 + 2 * layer; }
  static std::size_t stim_bias(std::size_t layers, std::size_t layer) { return 2 * layers + 2 + 2 * layer; }
  static std::size_t readout(std::size_t layers) { return 4 * layers + 1; }
};

}  // namespace mmdec::model
