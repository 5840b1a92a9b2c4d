#include "mmdec/train/trainer.hpp"

#include <cmath>
#include <cstdio>

#include "mmdec/common/binary_io.hpp"
#include "mmdec/common/parallel.hpp"
#include "mmdec/common/log.hpp"
#include "mmdec/model/checkpoint.hpp"

namespace mmdec::train {

TrainSettings TrainSettings::from(const data::RunConfig& c) {
  c.validate();
  TrainSettings s;
  s.scheme = SamplingScheme::from(c);
  s.batch_size = c.batch_size;
  s.learning_rate = c.learning_rate;
  s.lr_decay_every = c.lr_decay_every;
  s.lr_decay_factor = c.lr_decay_factor;
  s.patience = c.patience;
  s.max_epochs = c.max_epochs;
  s.adam = {c.adam_beta1, c.adam_beta2, c.adam_epsilon};
  s.threads = c.threads;
  s.seed = c.seed;
  return s;
}

model::DecoderConfig decoder_config(const data::RunConfig& config) {
  auto c = model::DecoderConfig::for_kind(config.feature);
  c.segment_seconds = config.segment_seconds;
  c.validate();
  return c;
}

std::vector<int> alternating_labels(std::size_t n) {
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i % 2 == 0 ? 1 : 0;
  return labels;
}

std::vector<ExampleRef> validation_examples(const Dataset& ds, const SamplingScheme& scheme) {
  SamplingScheme val = scheme;
  val.stride_seconds = scheme.segment_seconds;
  std::vector<ExampleRef> out;
  for (const auto& trial : examples_by_trial(ds, Portion::Validation, val)) out.insert(out.end(), trial.begin(), trial.end());
  return out;
}

namespace {

struct Presented {
  Tensor<float> eeg, a, b;
};

Presented present(const Dataset& ds, const ExampleRef& ex, int label) {
  auto t = extract_example(ds, ex);
  if (label == 1) return {std::move(t.eeg), std::move(t.matched), std::move(t.mismatched)};
  return {std::move(t.eeg), std::move(t.mismatched), std::move(t.matched)};
}

double example_loss(const Params& params, const Dataset& ds, const ExampleRef& ex, int label,
                    std::vector<std::vector<double>>* grads) {
  const auto in = present(ds, ex, label);
  model::Tape<float> tape;
  const auto vars = model::param_leaves(tape, params, grads != nullptr);
  const auto out = model::forward(params.config, vars, tape.leaf(in.eeg), tape.leaf(in.a), tape.leaf(in.b));
  const auto loss = autodiff::bce_loss(out.probability, static_cast<float>(label));
  const double value = static_cast<double>(loss.value()[0]);
  if (grads) {
    tape.backward(loss);
    grads->resize(vars.size());
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const auto& g = tape.grad(vars[k]);
      (*grads)[k].assign(g.begin(), g.end());
    }
  }
  return value;
}

}  // namespace

double mean_loss(const Params& params, const Dataset& ds, const std::vector<ExampleRef>& examples,
                 const std::vector<int>& labels, std::size_t threads) {
  if (examples.empty()) throw Error("mean_loss: no examples");
  std::vector<double> losses(examples.size());
  parallel_for(examples.size(), threads,
               [&](std::size_t i) { losses[i] = example_loss(params, ds, examples[i], labels[i], nullptr); });
  double total = 0.0;
  for (const double l : losses) total += l;
  return total / static_cast<double>(examples.size());
}

double batch_gradient(const Params& params, const Dataset& ds, const std::vector<ExampleRef>& examples,
                      const std::vector<int>& labels, std::vector<std::vector<double>>& grads, std::size_t threads) {
  if (examples.empty() || examples.size() != labels.size()) throw Error("batch_gradient: bad batch");
  std::vector<double> losses(examples.size());
  std::vector<std::vector<std::vector<double>>> slots(examples.size());
  parallel_for(examples.size(), threads,
               [&](std::size_t i) { losses[i] = example_loss(params, ds, examples[i], labels[i], &slots[i]); });
  grads.assign(params.arrays.size(), {});
  for (std::size_t k = 0; k < params.arrays.size(); ++k) grads[k].assign(params.arrays[k].size(), 0.0);
  const double scale = 1.0 / static_cast<double>(examples.size());
  double total = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    total += losses[i];
    for (std::size_t k = 0; k < grads.size(); ++k)
      for (std::size_t j = 0; j < grads[k].size(); ++j) grads[k][j] += slots[i][k][j] * scale;
  }
  return total * scale;
}

FitResult fit(const Params& init, const Dataset& ds, const std::vector<std::vector<ExampleRef>>& train_examples,
              const std::vector<ExampleRef>& val_examples, const TrainSettings& s, const EpochCallback& on_epoch) {
  model::check_params(init);
  FitResult result{init, {}, 0, false};
  if (s.max_epochs == 0) return result;
  std::size_t n_train = 0;
  for (const auto& t : train_examples) n_train += t.size();
  if (n_train < s.batch_size) {
    throw Error("fit: " + std::to_string(n_train) + " training examples, fewer than one batch of " +
                std::to_string(s.batch_size));
  }
  if (val_examples.empty()) throw Error("fit: no validation examples");
  const auto val_labels = alternating_labels(val_examples.size());

  Params current = init;
  AdamState adam = adam_init(current.arrays);
  EarlyStopper stopper(s.patience);
  const Rng root = Rng(s.seed).derive("epochs");
  std::vector<ExampleRef> flat;
  std::vector<std::vector<double>> grads;
  for (std::size_t epoch = 0; epoch < s.max_epochs; ++epoch) {
    Rng rng = root.derive(epoch);
    const double lr = lr_schedule(epoch, s.learning_rate, s.lr_decay_every, s.lr_decay_factor);
    const auto batches = make_batches(train_examples, s.batch_size, rng, flat);
    const std::size_t skipped_before = adam.skipped;
    double train_total = 0.0;
    for (const auto& batch : batches) {
      std::vector<ExampleRef> refs;
      refs.reserve(batch.examples.size());
      for (const auto i : batch.examples) refs.push_back(flat[i]);
      const double loss = batch_gradient(current, ds, refs, batch.labels, grads, s.threads);
      if (!std::isfinite(loss)) {
        throw TrainingDiverged("training loss became non-finite in epoch " + std::to_string(epoch + 1));
      }
      train_total += loss;
      adam_step(current.arrays, grads, adam, lr, s.adam);
    }
    EpochMetrics m;
    m.epoch = epoch + 1;
    m.train_loss = train_total / static_cast<double>(batches.size());
    m.val_loss = mean_loss(current, ds, val_examples, val_labels, s.threads);
    m.lr = lr;
    m.skipped_updates = adam.skipped - skipped_before;
    if (!std::isfinite(m.val_loss)) {
      throw TrainingDiverged("validation loss became non-finite in epoch " + std::to_string(m.epoch));
    }
    if (m.skipped_updates > 0) {
      log_warning("epoch " + std::to_string(m.epoch) + ": skipped " + std::to_string(m.skipped_updates) +
                  " updates with non-finite gradients");
    }
    m.improved = stopper.update(m.val_loss);
    if (m.improved) {
      result.params = current;
      result.best_epoch = m.epoch;
    }
    result.history.push_back(m);
    if (on_epoch) on_epoch(m, result.params);
    if (stopper.should_stop()) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

FitResult fit_population(const Dataset& ds, const model::DecoderConfig& config, const TrainSettings& s,
                         const EpochCallback& on_epoch) {
  if (config.rate != signal::feature_rate(ds.kind)) throw Error("fit_population: decoder and dataset rates differ");
  const auto init = model::init_glorot(config, s.seed);
  return fit(init, ds, examples_by_trial(ds, Portion::Train, s.scheme), validation_examples(ds, s.scheme), s,
             on_epoch);
}

Dataset participant_subset(const Dataset& ds, const std::string& participant) {
  Dataset out{ds.name, ds.kind, ds.splits, {}};
  for (const auto& t : ds.trials)
    if (t.participant_id == participant) out.trials.push_back(t);
  return out;
}

FitResult fine_tune(const Params& population, const Dataset& ds, const std::string& participant,
                    const TrainSettings& s, const EpochCallback& on_epoch) {
  const auto subset = participant_subset(ds, participant);
  if (subset.trials.empty()) throw Error("fine_tune: no trials for participant '" + participant + "'");
  const auto train = examples_by_trial(subset, Portion::Train, s.scheme);
  const auto val = validation_examples(subset, s.scheme);
  if (train.empty() || val.empty()) {
    throw Error("fine_tune: participant '" + participant + "' has too little training or validation data");
  }
  return fit(population, subset, train, val, s, on_epoch);
}

namespace {

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

FitResult train_run_directory(const std::filesystem::path& dir, const data::RunConfig& config,
                              const std::function<FitResult(const EpochCallback&)>& run) {
  std::filesystem::create_directories(dir);
  config.save(dir / "config.txt");
  std::string metrics = "epoch\ttrain_loss\tval_loss\tlr\n";
  write_file_atomic(dir / "metrics.tsv", metrics);
  const auto result = run([&](const EpochMetrics& m, const Params& best) {
    metrics += std::to_string(m.epoch) + "\t" + format_g(m.train_loss) + "\t" + format_g(m.val_loss) + "\t" +
               format_g(m.lr) + "\n";
    write_file_atomic(dir / "metrics.tsv", metrics);
    if (m.improved) model::save_checkpoint(best, dir / "best.ckpt");
    log_info(dir.filename().string() + " epoch " + std::to_string(m.epoch) + ": train " + format_g(m.train_loss) +
             ", val " + format_g(m.val_loss));
  });
  model::save_checkpoint(result.params, dir / "best.ckpt");
  return result;
}

}  // namespace mmdec::train
