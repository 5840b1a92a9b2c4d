#include "mmdec/model/config.hpp"

#include <cmath>

#include "mmdec/common/error.hpp"

namespace mmdec::model {

DecoderConfig DecoderConfig::for_kind(FeatureKind kind) {
  DecoderConfig c;
  c.feature_kind = kind;
  c.rate = signal::feature_rate(kind);
  return c;
}

std::size_t DecoderConfig::segment_samples() const {
  return static_cast<std::size_t>(std::lround(segment_seconds * rate));
}

std::size_t DecoderConfig::receptive_field() const {
  std::size_t field = 1;
  for (const auto d : dilations) field += (kernel - 1) * d;
  return field;
}

void DecoderConfig::validate() const {
  if (eeg_channels == 0 || hidden_channels == 0 || kernel == 0 || dilations.empty()) {
    throw Error("decoder config: channel counts, kernel size and layer count must be positive");
  }
  for (const auto d : dilations) {
    if (d == 0) throw Error("decoder config: dilations must be >= 1");
  }
  if (rate != signal::feature_rate(feature_kind)) {
    throw Error("decoder config: rate " + std::to_string(rate) + " Hz does not match feature kind " +
                signal::to_string(feature_kind));
  }
  if (segment_samples() <= receptive_field()) {
    throw Error("decoder config: segment of " + std::to_string(segment_samples()) +
                " samples is not longer than the receptive field (" + std::to_string(receptive_field()) + ")");
  }
}

ReceptiveField receptive_field(const DecoderConfig& config) {
  const std::size_t samples = config.receptive_field();
  return {samples, static_cast<double>(samples) / config.rate};
}

std::vector<ParamSpec> parameter_layout(const DecoderConfig& config) {
  const std::size_t L = config.hidden_channels;
  const std::size_t K = config.kernel;
  const std::size_t C = config.eeg_channels;
  std::vector<ParamSpec> specs;

  specs.push_back({"eeg.spatial", {L, C}, C, L, false});
  specs.push_back({"eeg.temporal", {L, K}, K, K, false});
  specs.push_back({"eeg.bias0", {L}, 0, 0, true});
  for (std::size_t l = 1; l < config.layers(); ++l) {
    specs.push_back({"eeg.weight" + std::to_string(l), {L, L, K}, L * K, L * K, false});
    specs.push_back({"eeg.bias" + std::to_string(l), {L}, 0, 0, true});
  }
  for (std::size_t l = 0; l < config.layers(); ++l) {
    const std::size_t in = l == 0 ? 1 : L;
    specs.push_back({"stim.weight" + std::to_string(l), {L, in, K}, in * K, L * K, false});
    specs.push_back({"stim.bias" + std::to_string(l), {L}, 0, 0, true});
  }
  specs.push_back({"readout", {L * L}, L * L, 1, false});
  return specs;
}

std::size_t parameter_count(const DecoderConfig& config) {
  std::size_t n = 0;
  for (const auto& s : parameter_layout(config)) n += autodiff::element_count(s.shape);
  return n;
}

}  // namespace mmdec::model
