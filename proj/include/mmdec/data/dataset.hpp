#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mmdec/data/manifest.hpp"

namespace mmdec::data {

enum class Portion { Train, Validation, Test, All };

std::string to_string(Portion p);

// Sample range [begin, end) of one split portion. Boundaries are placed on
// whole seconds: train covers [0, floor(f_train * S)), validation the next
// floor(f_val * S) seconds and test the remainder, S being the whole seconds
// in the trial. Trailing samples past the last whole second belong to test.
std::pair<std::size_t, std::size_t> portion_range(std::size_t samples, double rate, const SplitFractions& splits,
                                                  Portion portion);

// Decoder-rate data of one trial, ready for segment extraction.
struct TrialData {
  std::string participant_id;
  std::string trial_id;
  Condition condition = Condition::Quiet;
  double narrator_pitch_hz = 0.0;
  double rate = 0.0;
  std::size_t channels = 0;
  std::size_t samples = 0;
  std::vector<float> eeg;       // channels x samples, channel-major
  std::vector<float> stimulus;  // attended or only stream
  std::vector<float> ignored;   // competing trials only

  double duration_seconds() const { return static_cast<double>(samples) / rate; }
};

struct Dataset {
  std::string name;
  FeatureKind kind = FeatureKind::Envelope;
  SplitFractions splits;
  std::vector<TrialData> trials;

  std::vector<std::string> participants() const;
};

// Loads the aligned EEG and stimulus features of every trial. Throws
// DataError on missing files, rate mismatches or length mismatches between
// EEG and stimuli (stimuli longer than the EEG are truncated).
Dataset load_dataset(const DatasetManifest& manifest, FeatureKind kind);

}  // namespace mmdec::data
