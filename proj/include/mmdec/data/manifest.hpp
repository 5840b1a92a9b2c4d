#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mmdec/signal/features.hpp"

namespace mmdec::data {

using signal::FeatureKind;

enum class Condition { Quiet, Noise, Foreign, Competing };

std::string to_string(Condition c);
Condition parse_condition(const std::string& text);

struct SplitFractions {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;

  void validate() const;
  bool operator==(const SplitFractions&) const = default;
};

// Files describing one speech stream. Empty strings mark absent files.
struct StreamFiles {
  std::string audio;
  std::string envelope;
  std::string modulations;

  const std::string& feature(FeatureKind kind) const;
  std::string& feature(FeatureKind kind);
  bool operator==(const StreamFiles&) const = default;
};

// EEG files of one trial: raw recording and decoder-rate preprocessed
// versions aligned with each feature kind.
struct EegFiles {
  std::string raw;
  std::string envelope;
  std::string modulations;

  const std::string& aligned(FeatureKind kind) const;
  std::string& aligned(FeatureKind kind);
  bool operator==(const EegFiles&) const = default;
};

struct Narrator {
  std::string sex;  // "female", "male" or empty
  double pitch_hz = 0.0;
  bool operator==(const Narrator&) const = default;
};

struct TrialRecord {
  std::string participant_id;
  std::string trial_id;
  Condition condition = Condition::Quiet;
  std::optional<double> snr_db;  // background level for Condition::Noise
  Narrator narrator;
  EegFiles eeg;
  // One stream, or attended then ignored for Condition::Competing.
  std::vector<StreamFiles> streams;

  const StreamFiles& attended() const { return streams.at(0); }
  bool operator==(const TrialRecord&) const = default;
};

struct DatasetManifest {
  std::string name;
  std::string layout = "biosemi64";
  SplitFractions splits;
  std::vector<TrialRecord> trials;
  // Directory that relative paths are resolved against.
  std::filesystem::path base_dir;

  // Throws mmdec::DataError on duplicate trial ids, bad fractions or a
  // competing trial without exactly two streams.
  void validate() const;
  std::filesystem::path resolve(const std::string& relative) const;
  std::vector<std::string> participants() const;
};

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

}  // namespace mmdec::data
