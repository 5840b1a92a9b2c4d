#include "mmdec/data/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "mmdec/common/error.hpp"
#include "mmdec/data/timeseries_io.hpp"

namespace mmdec::data {

std::string to_string(Portion p) {
  switch (p) {
    case Portion::Train: return "train";
    case Portion::Validation: return "validation";
    case Portion::Test: return "test";
    case Portion::All: return "all";
  }
  return "unknown";
}

std::pair<std::size_t, std::size_t> portion_range(std::size_t samples, double rate, const SplitFractions& splits,
                                                  Portion portion) {
  if (!(rate > 0.0)) throw Error("portion_range: rate must be positive");
  splits.validate();
  if (portion == Portion::All) return {0, samples};
  const double seconds = std::floor(static_cast<double>(samples) / rate);
  const double train_end = std::floor(splits.train * seconds + 1e-9);
  const double val_end = train_end + std::floor(splits.validation * seconds + 1e-9);
  const auto at = [&](double s) { return std::min(samples, static_cast<std::size_t>(std::llround(s * rate))); };
  switch (portion) {
    case Portion::Train: return {0, at(train_end)};
    case Portion::Validation: return {at(train_end), at(val_end)};
    default: return {at(val_end), samples};
  }
}

std::vector<std::string> Dataset::participants() const {
  std::vector<std::string> out;
  for (const auto& t : trials) {
    if (std::find(out.begin(), out.end(), t.participant_id) == out.end()) out.push_back(t.participant_id);
  }
  return out;
}

namespace {

std::vector<float> load_stream(const DatasetManifest& m, const TrialRecord& t, const StreamFiles& s, FeatureKind kind,
                               double rate, std::size_t samples) {
  const auto& rel = s.feature(kind);
  if (rel.empty()) {
    throw DataError("trial '" + t.trial_id + "' has no " + signal::to_string(kind) + " stimulus feature file");
  }
  const auto ts = read_timeseries(m.resolve(rel));
  if (ts.channels() != 1) {
    throw DataError(rel + ": stimulus feature must have 1 channel, found " + std::to_string(ts.channels()));
  }
  if (ts.rate != rate) {
    throw DataError(rel + ": stimulus rate " + std::to_string(ts.rate) + " Hz differs from EEG rate " +
                    std::to_string(rate) + " Hz");
  }
  if (ts.samples < samples) {
    throw DataError(rel + ": stimulus has " + std::to_string(ts.samples) + " samples, EEG has " +
                    std::to_string(samples));
  }
  return {ts.values.begin(), ts.values.begin() + static_cast<std::ptrdiff_t>(samples)};
}

}  // namespace

Dataset load_dataset(const DatasetManifest& manifest, FeatureKind kind) {
  manifest.validate();
  Dataset ds{manifest.name, kind, manifest.splits, {}};
  const double rate = signal::feature_rate(kind);
  std::size_t channels = 0;
  for (const auto& t : manifest.trials) {
    const auto& rel = t.eeg.aligned(kind);
    if (rel.empty()) {
      throw DataError("trial '" + t.trial_id + "' has no preprocessed EEG for " + signal::to_string(kind) +
                      "; run preprocess first");
    }
    auto eeg = read_timeseries(manifest.resolve(rel));
    if (eeg.rate != rate) {
      throw DataError(rel + ": EEG rate " + std::to_string(eeg.rate) + " Hz, expected " + std::to_string(rate) +
                      " Hz for " + signal::to_string(kind));
    }
    if (channels == 0) channels = eeg.channels();
    if (eeg.channels() != channels) {
      throw DataError(rel + ": " + std::to_string(eeg.channels()) + " EEG channels, other trials have " +
                      std::to_string(channels));
    }
    TrialData td;
    td.participant_id = t.participant_id;
    td.trial_id = t.trial_id;
    td.condition = t.condition;
    td.narrator_pitch_hz = t.narrator.pitch_hz;
    td.rate = rate;
    td.channels = eeg.channels();
    td.samples = eeg.samples;
    td.eeg = std::move(eeg.values);
    td.stimulus = load_stream(manifest, t, t.streams[0], kind, rate, td.samples);
    if (t.condition == Condition::Competing) {
      td.ignored = load_stream(manifest, t, t.streams[1], kind, rate, td.samples);
    }
    ds.trials.push_back(std::move(td));
  }
  return ds;
}

}  // namespace mmdec::data
