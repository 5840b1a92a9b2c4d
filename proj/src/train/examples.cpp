#include "mmdec/train/examples.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mmdec/common/error.hpp"
#include "mmdec/common/log.hpp"

namespace mmdec::train {

namespace {

constexpr double kTolerance = 1e-9;

}  // namespace

SamplingScheme SamplingScheme::from(const data::RunConfig& config) {
  return {config.segment_seconds, config.stride_seconds, config.gap_seconds};
}

std::vector<ExampleRef> enumerate_examples(std::size_t trial, double start_s, double end_s,
                                           const SamplingScheme& scheme) {
  std::vector<ExampleRef> out;
  if (!(scheme.segment_seconds > 0.0) || !(scheme.stride_seconds > 0.0) || !(scheme.gap_seconds >= 0.0)) {
    throw Error("enumerate_examples: segment and stride must be positive, gap non-negative");
  }
  for (std::size_t k = 0;; ++k) {
    const double onset = start_s + static_cast<double>(k) * scheme.stride_seconds;
    if (onset + scheme.span_seconds() > end_s + kTolerance) break;
    out.push_back({trial, onset, onset + scheme.segment_seconds + scheme.gap_seconds, scheme.segment_seconds, false});
  }
  if (out.empty()) {
    log_warning("enumerate_examples: trial " + std::to_string(trial) + " range of " + std::to_string(end_s - start_s) +
                " s is shorter than one example (" + std::to_string(scheme.span_seconds()) + " s)");
  }
  return out;
}

std::vector<ExampleRef> enumerate_attention_examples(std::size_t trial, double start_s, double end_s,
                                                     const SamplingScheme& scheme) {
  std::vector<ExampleRef> out;
  for (std::size_t k = 0;; ++k) {
    const double onset = start_s + static_cast<double>(k) * scheme.stride_seconds;
    if (onset + scheme.segment_seconds > end_s + kTolerance) break;
    out.push_back({trial, onset, onset, scheme.segment_seconds, true});
  }
  return out;
}

std::pair<double, double> portion_seconds(const data::TrialData& trial, const data::SplitFractions& splits,
                                          Portion portion) {
  const auto [b, e] = data::portion_range(trial.samples, trial.rate, splits, portion);
  return {static_cast<double>(b) / trial.rate, static_cast<double>(e) / trial.rate};
}

std::vector<std::vector<ExampleRef>> examples_by_trial(const Dataset& ds, Portion portion,
                                                       const SamplingScheme& scheme) {
  std::vector<std::vector<ExampleRef>> out;
  for (std::size_t i = 0; i < ds.trials.size(); ++i) {
    if (ds.trials[i].condition == data::Condition::Competing) continue;
    const auto [start, end] = portion_seconds(ds.trials[i], ds.splits, portion);
    auto ex = enumerate_examples(i, start, end, scheme);
    if (!ex.empty()) out.push_back(std::move(ex));
  }
  return out;
}

ExampleTensors extract_example(const Dataset& ds, const ExampleRef& ex) {
  if (ex.trial >= ds.trials.size()) throw Error("extract_example: trial index out of range");
  const auto& t = ds.trials[ex.trial];
  const auto len = static_cast<std::size_t>(std::llround(ex.length_s * t.rate));
  const auto onset = static_cast<std::size_t>(std::llround(ex.onset_s * t.rate));
  const auto mismatch = static_cast<std::size_t>(std::llround(ex.mismatch_onset_s * t.rate));
  const auto& other = ex.use_ignored ? t.ignored : t.stimulus;
  if (ex.onset_s < 0.0 || ex.mismatch_onset_s < 0.0 || onset + len > t.samples || mismatch + len > other.size()) {
    throw Error("extract_example: example at " + std::to_string(ex.onset_s) + " s reaches outside trial '" +
                t.trial_id + "'");
  }
  ExampleTensors out{Tensor<float>({t.channels, len}), Tensor<float>({1, len}), Tensor<float>({1, len})};
  for (std::size_t c = 0; c < t.channels; ++c) {
    std::copy_n(t.eeg.begin() + static_cast<std::ptrdiff_t>(c * t.samples + onset), len,
                out.eeg.values().begin() + static_cast<std::ptrdiff_t>(c * len));
  }
  std::copy_n(t.stimulus.begin() + static_cast<std::ptrdiff_t>(onset), len, out.matched.values().begin());
  std::copy_n(other.begin() + static_cast<std::ptrdiff_t>(mismatch), len, out.mismatched.values().begin());
  return out;
}

std::vector<Batch> make_batches(const std::vector<std::vector<ExampleRef>>& by_trial, std::size_t batch_size,
                                Rng& rng, std::vector<ExampleRef>& flat) {
  if (batch_size < 2 || batch_size % 2 != 0) throw Error("make_batches: batch size must be even and at least 2");
  std::vector<std::size_t> order(by_trial.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng.engine());
  flat.clear();
  for (const auto t : order) flat.insert(flat.end(), by_trial[t].begin(), by_trial[t].end());

  std::vector<Batch> batches;
  std::vector<int> labels(batch_size, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(batch_size / 2), 1);
  for (std::size_t start = 0; start + batch_size <= flat.size(); start += batch_size) {
    Batch b;
    b.examples.resize(batch_size);
    std::iota(b.examples.begin(), b.examples.end(), start);
    b.labels = labels;
    std::shuffle(b.labels.begin(), b.labels.end(), rng.engine());
    batches.push_back(std::move(b));
  }
  return batches;
}

}  // namespace mmdec::train
