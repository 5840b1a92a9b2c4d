#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mmdec/autodiff/ops.hpp"
#include "mmdec/common/rng.hpp"
#include "mmdec/model/config.hpp"

namespace mmdec::model {

using autodiff::Tape;
using autodiff::Tensor;
using autodiff::Var;

// All learnable arrays of one decoder, in parameter_layout() order.
template <typename T>
struct DecoderParams {
  DecoderConfig config;
  std::vector<Tensor<T>> arrays;

  const Tensor<T>& operator[](std::size_t i) const { return arrays[i]; }
  Tensor<T>& operator[](std::size_t i) { return arrays[i]; }

  template <typename U>
  DecoderParams<U> cast() const {
    DecoderParams<U> out{config, {}};
    for (const auto& a : arrays) out.arrays.push_back(a.template cast<U>());
    return out;
  }

  bool operator==(const DecoderParams& other) const = default;
};

// Throws if the arrays do not match the configured shapes.
template <typename T>
void check_params(const DecoderParams<T>& params) {
  const auto layout = parameter_layout(params.config);
  if (layout.size() != params.arrays.size()) {
    throw Error("decoder params: expected " + std::to_string(layout.size()) + " arrays, got " +
                std::to_string(params.arrays.size()));
  }
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (layout[i].shape != params.arrays[i].shape()) {
      throw Error("decoder params: " + layout[i].name + " has shape " + autodiff::shape_string(params.arrays[i].shape()) +
                  ", expected " + autodiff::shape_string(layout[i].shape));
    }
  }
}

// Glorot-uniform weights on [-a, a] with a = sqrt(6 / (fan_in + fan_out));
// biases zero.
template <typename T = float>
DecoderParams<T> init_glorot(const DecoderConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng = Rng(seed).derive("glorot");
  DecoderParams<T> params{config, {}};
  for (const auto& spec : parameter_layout(config)) {
    Tensor<T> t(spec.shape);
    if (!spec.is_bias) {
      const double a = std::sqrt(6.0 / static_cast<double>(spec.fan_in + spec.fan_out));
      for (auto& v : t.values()) v = static_cast<T>(rng.uniform(-a, a));
    }
    params.arrays.push_back(std::move(t));
  }
  return params;
}

template <typename T>
struct ForwardVars {
  Var<T> eeg_projection;
  Var<T> similarity_a;
  Var<T> similarity_b;
  Var<T> logit;
  Var<T> probability;
};

// EEG module f: separable first layer, then dense dilated layers, with ReLU
// between consecutive layers.
template <typename T>
Var<T> eeg_module(const DecoderConfig& config, const std::vector<Var<T>>& p, const Var<T>& eeg) {
  const auto& d = config.dilations;
  Var<T> h = autodiff::separable_conv1d(eeg, p[ParamIndex::kEegSpatial], p[ParamIndex::kEegTemporal],
                                        p[ParamIndex::kEegBias0], d[0]);
  for (std::size_t l = 1; l < config.layers(); ++l) {
    h = autodiff::relu(h);
    h = autodiff::conv1d_dilated(h, p[ParamIndex::eeg_weight(l)], p[ParamIndex::eeg_bias(l)], d[l]);
  }
  return h;
}

// Stimulus module g: dense dilated layers with ReLU in between.
template <typename T>
Var<T> stimulus_module(const DecoderConfig& config, const std::vector<Var<T>>& p, const Var<T>& stim) {
  const auto n = config.layers();
  Var<T> h = stim;
  for (std::size_t l = 0; l < n; ++l) {
    if (l > 0) h = autodiff::relu(h);
    h = autodiff::conv1d_dilated(h, p[ParamIndex::stim_weight(n, l)], p[ParamIndex::stim_bias(n, l)],
                                 config.dilations[l]);
  }
  return h;
}

// y_hat = sigmoid(v . vec(S(f(eeg), g(a)) - S(f(eeg), g(b)))), the probability
// that `stim_a` is the matched segment.
template <typename T>
ForwardVars<T> forward(const DecoderConfig& config, const std::vector<Var<T>>& p, const Var<T>& eeg,
                       const Var<T>& stim_a, const Var<T>& stim_b) {
  const auto& es = eeg.shape();
  if (es.size() != 2 || es[0] != config.eeg_channels) {
    throw Error("forward: EEG segment must be " + std::to_string(config.eeg_channels) + " x T, got " +
                autodiff::shape_string(es));
  }
  if (stim_a.shape() != stim_b.shape() || stim_a.shape().size() != 2 || stim_a.shape()[0] != 1) {
    throw Error("forward: stimulus segments must both be 1 x T, got " + autodiff::shape_string(stim_a.shape()) +
                " and " + autodiff::shape_string(stim_b.shape()));
  }
  if (es[1] != stim_a.shape()[1]) {
    throw Error("forward: EEG (" + std::to_string(es[1]) + " samples) and stimulus (" +
                std::to_string(stim_a.shape()[1]) + " samples) segments differ in length");
  }
  ForwardVars<T> out;
  out.eeg_projection = eeg_module(config, p, eeg);
  const Var<T> ga = stimulus_module(config, p, stim_a);
  const Var<T> gb = stimulus_module(config, p, stim_b);
  out.similarity_a = autodiff::cosine_similarity_matrix(out.eeg_projection, ga);
  out.similarity_b = autodiff::cosine_similarity_matrix(out.eeg_projection, gb);
  const Var<T> diff = autodiff::subtract(out.similarity_a, out.similarity_b);
  out.logit = autodiff::linear_readout(diff, p[ParamIndex::readout(config.layers())]);
  out.probability = autodiff::sigmoid(out.logit);
  return out;
}

template <typename T>
std::vector<Var<T>> param_leaves(Tape<T>& tape, const DecoderParams<T>& params, bool requires_grad) {
  std::vector<Var<T>> vars;
  vars.reserve(params.arrays.size());
  for (const auto& a : params.arrays) vars.push_back(tape.leaf(a, requires_grad));
  return vars;
}

struct ModelOutput {
  double probability;
  double logit;
  Tensor<double> similarity_a;
  Tensor<double> similarity_b;
};

// Inference on a single example. eeg: C x T, stim_a / stim_b: 1 x T.
template <typename T>
ModelOutput predict(const DecoderParams<T>& params, const Tensor<T>& eeg, const Tensor<T>& stim_a,
                    const Tensor<T>& stim_b) {
  Tape<T> tape;
  const auto p = param_leaves(tape, params, false);
  const auto vars = forward(params.config, p, tape.leaf(eeg), tape.leaf(stim_a), tape.leaf(stim_b));
  return {static_cast<double>(vars.probability.value()[0]), static_cast<double>(vars.logit.value()[0]),
          vars.similarity_a.value().template cast<double>(), vars.similarity_b.value().template cast<double>()};
}

}  // namespace mmdec::model
