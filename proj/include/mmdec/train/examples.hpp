#pragma once

#include <cstddef>
#include <vector>

#include "mmdec/autodiff/tensor.hpp"
#include "mmdec/common/rng.hpp"
#include "mmdec/data/dataset.hpp"
#include "mmdec/data/run_config.hpp"

namespace mmdec::train {

using autodiff::Tensor;
using data::Dataset;
using data::Portion;

struct SamplingScheme {
  double segment_seconds = 3.0;
  double stride_seconds = 1.0;
  double gap_seconds = 1.0;

  static SamplingScheme from(const data::RunConfig& config);
  // Seconds of data consumed by one match-mismatch example.
  double span_seconds() const { return 2.0 * segment_seconds + gap_seconds; }
};

// One example, located in seconds so that the same example can be cut from
// data at any rate. The matched stimulus starts at onset_s; the mismatched
// one starts at mismatch_onset_s of the same stream, or at onset_s of the
// ignored stream when use_ignored is set.
struct ExampleRef {
  std::size_t trial = 0;
  double onset_s = 0.0;
  double mismatch_onset_s = 0.0;
  double length_s = 0.0;
  bool use_ignored = false;

  bool operator==(const ExampleRef&) const = default;
};

// Matched onsets start, start + stride, ... with the mismatched segment one
// gap after the matched end. Only examples ending by end_s are kept. Returns
// an empty list (with a warning) when the range is shorter than one example.
std::vector<ExampleRef> enumerate_examples(std::size_t trial, double start_s, double end_s,
                                           const SamplingScheme& scheme);

// Attended stream as matched and the time-aligned ignored stream as
// mismatched, onsets every stride from start_s.
std::vector<ExampleRef> enumerate_attention_examples(std::size_t trial, double start_s, double end_s,
                                                     const SamplingScheme& scheme);

// Start and end, in seconds, of a portion of one trial.
std::pair<double, double> portion_seconds(const data::TrialData& trial, const data::SplitFractions& splits,
                                          Portion portion);

// Match-mismatch examples from one portion of every single-stream trial
// (competing trials are left out), grouped by trial in dataset order.
std::vector<std::vector<ExampleRef>> examples_by_trial(const Dataset& ds, Portion portion,
                                                       const SamplingScheme& scheme);

struct ExampleTensors {
  Tensor<float> eeg;         // C x T
  Tensor<float> matched;     // 1 x T
  Tensor<float> mismatched;  // 1 x T
};

// Throws mmdec::Error if the example reaches outside its trial.
ExampleTensors extract_example(const Dataset& ds, const ExampleRef& ex);

// One optimisation batch: example indices and labels (1 when the matched
// stimulus is presented first).
struct Batch {
  std::vector<std::size_t> examples;
  std::vector<int> labels;
};

// Visits trials in a random order, keeps examples of a trial in order, cuts
// the sequence into full batches (a final partial batch is dropped) and
// assigns exactly half of each batch label 1 at random positions.
std::vector<Batch> make_batches(const std::vector<std::vector<ExampleRef>>& by_trial, std::size_t batch_size,
                                Rng& rng, std::vector<ExampleRef>& flat);

}  // namespace mmdec::train
