#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mmdec/signal/features.hpp"

namespace mmdec::data {

enum class EvalMode { MatchMismatch, Attention };
enum class EvalPortion { Test, All };

std::string to_string(EvalMode mode);
EvalMode parse_eval_mode(const std::string& text);

// Every tunable setting of a run. Stored as flat `key = value` text; unknown
// keys and ill-typed values are rejected.
struct RunConfig {
  signal::FeatureKind feature = signal::FeatureKind::Envelope;
  std::uint64_t seed = 0;
  std::string output_dir;

  // Example sampling
  double segment_seconds = 3.0;
  double stride_seconds = 1.0;
  double gap_seconds = 1.0;

  // Optimisation
  std::size_t batch_size = 128;
  double learning_rate = 1e-3;
  std::size_t lr_decay_every = 7;
  double lr_decay_factor = 10.0;
  std::size_t patience = 5;
  std::size_t max_epochs = 50;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t threads = 1;

  // Evaluation and ensembling
  EvalMode eval_mode = EvalMode::MatchMismatch;
  EvalPortion eval_portion = EvalPortion::Test;
  std::vector<double> eval_segments = {3.0};
  std::vector<std::size_t> ensemble_sizes = {1, 2, 5, 10, 25};
  std::size_t ensemble_draws = 50;

  // Throws mmdec::Error when a value is out of range.
  void validate() const;

  // Parses text, starting from the defaults above.
  static RunConfig parse(const std::string& text, const std::string& source = "config");
  static RunConfig load(const std::filesystem::path& path);
  // Applies one `key = value` assignment.
  void set(const std::string& key, const std::string& value);
  // Every key in a fixed order.
  std::string to_text() const;
  void save(const std::filesystem::path& path) const;

  static std::vector<std::string> keys();
  bool operator==(const RunConfig&) const = default;
};

}  // namespace mmdec::data
