#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mmdec/data/dataset.hpp"
#include "mmdec/data/run_config.hpp"
#include "mmdec/model/decoder.hpp"
#include "mmdec/train/adam.hpp"
#include "mmdec/train/examples.hpp"

namespace mmdec::train {

using Params = model::DecoderParams<float>;

struct TrainSettings {
  SamplingScheme scheme;
  std::size_t batch_size = 128;
  double learning_rate = 1e-3;
  std::size_t lr_decay_every = 7;
  double lr_decay_factor = 10.0;
  std::size_t patience = 5;
  std::size_t max_epochs = 50;
  AdamConfig adam;
  std::size_t threads = 1;
  std::uint64_t seed = 0;

  static TrainSettings from(const data::RunConfig& config);
};

// Raised when the training loss stops being finite.
class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

struct EpochMetrics {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
  std::size_t skipped_updates = 0;
  bool improved = false;
};

struct FitResult {
  Params params;  // snapshot with the best validation loss
  std::vector<EpochMetrics> history;
  std::size_t best_epoch = 0;  // 0 when no epoch ran
  bool stopped_early = false;
};

using EpochCallback = std::function<void(const EpochMetrics&, const Params& best)>;

// Validation examples: non-overlapping segments (stride = segment length)
// from the validation portion, labels alternating 1, 0, 1, ...
std::vector<ExampleRef> validation_examples(const Dataset& ds, const SamplingScheme& scheme);
std::vector<int> alternating_labels(std::size_t n);

// Mean BCE over examples presented according to labels.
double mean_loss(const Params& params, const Dataset& ds, const std::vector<ExampleRef>& examples,
                 const std::vector<int>& labels, std::size_t threads = 1);

// Mean BCE of a batch and its gradient, accumulated per array in double
// precision. Per-example gradients are summed in example order whatever the
// thread count.
double batch_gradient(const Params& params, const Dataset& ds, const std::vector<ExampleRef>& examples,
                      const std::vector<int>& labels, std::vector<std::vector<double>>& grads,
                      std::size_t threads = 1);

// Trains from `init`. Each epoch visits the training trials in a fresh random
// order; after it the mean validation BCE feeds early stopping. Returns the
// best snapshot. Throws TrainingDiverged on a non-finite training loss.
FitResult fit(const Params& init, const Dataset& ds, const std::vector<std::vector<ExampleRef>>& train_examples,
              const std::vector<ExampleRef>& val_examples, const TrainSettings& settings,
              const EpochCallback& on_epoch = {});

// Population training on the train/validation portions of every
// single-stream trial, from a Glorot initialisation seeded by settings.seed.
FitResult fit_population(const Dataset& ds, const model::DecoderConfig& config, const TrainSettings& settings,
                         const EpochCallback& on_epoch = {});

// Continues training on one participant's trials with a fresh optimiser and
// learning-rate schedule. The input parameters are not modified.
FitResult fine_tune(const Params& population, const Dataset& ds, const std::string& participant,
                    const TrainSettings& settings, const EpochCallback& on_epoch = {});

// Trials of the named participant only.
Dataset participant_subset(const Dataset& ds, const std::string& participant);

// Writes config.txt, metrics.tsv (epoch, train loss, val loss, lr) and
// best.ckpt into dir while training.
FitResult train_run_directory(const std::filesystem::path& dir, const data::RunConfig& config,
                              const std::function<FitResult(const EpochCallback&)>& run);

model::DecoderConfig decoder_config(const data::RunConfig& config);

}  // namespace mmdec::train
