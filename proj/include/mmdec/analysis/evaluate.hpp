#pragma once

#include <string>
#include <vector>

#include "mmdec/analysis/ensemble.hpp"
#include "mmdec/analysis/lda.hpp"
#include "mmdec/data/dataset.hpp"
#include "mmdec/data/run_config.hpp"
#include "mmdec/train/examples.hpp"
#include "mmdec/train/trainer.hpp"

namespace mmdec::analysis {

using data::EvalMode;
using train::ExampleRef;
using train::Params;

// Identity and presentation of one evaluated example.
struct ExampleRecord {
  std::string participant;
  std::string trial;
  data::Condition condition = data::Condition::Quiet;
  double segment_s = 0.0;
  double onset_s = 0.0;
  double mismatch_onset_s = 0.0;
  int label = 1;  // 1 when the matched (or attended) segment is presented first
  bool attention = false;

  bool operator==(const ExampleRecord&) const = default;
};

// Per-example logits of every evaluated instance.
struct ScoreTable {
  EvalMode mode = EvalMode::MatchMismatch;
  std::vector<ExampleRecord> examples;
  std::vector<std::string> instances;
  std::vector<std::vector<double>> logits;  // [instance][example]

  // Ensemble decision margin of each example over all (or the listed)
  // instances.
  std::vector<double> margins() const;
  std::vector<double> margins(const std::vector<std::size_t>& subset) const;
  std::vector<std::string> participants() const;
  AccuracyTarget target() const;
  // Mean probability across instances, per example.
  std::vector<double> probabilities() const;
  // Rows restricted to one segment length.
  ScoreTable select_segment(double segment_s) const;
  std::vector<double> segments() const;

  bool operator==(const ScoreTable&) const = default;
};

// Evaluation examples. Match-mismatch mode cuts single-stream trials per the
// training scheme (stride, gap); attention mode pairs the attended segment
// with the time-aligned ignored segment of competing trials. When several
// datasets are given (same trials at different rates), a trial contributes
// only the time range that all of them cover.
std::vector<ExampleRef> evaluation_examples(const std::vector<const data::Dataset*>& datasets, EvalMode mode,
                                            data::Portion portion, const train::SamplingScheme& scheme);

// Exchanges the attended and ignored streams of every competing trial.
data::Dataset swap_streams(const data::Dataset& ds);

// Scores refs with every decoder; labels alternate 1, 0, 1, ... in ref order.
// Throws mmdec::Error if the segment is shorter than a decoder's receptive
// field.
ScoreTable score_examples(const std::vector<Params>& decoders, const std::vector<std::string>& ids,
                          const data::Dataset& ds, const std::vector<ExampleRef>& refs, EvalMode mode,
                          std::size_t threads = 1);

struct AccuracyRow {
  std::string participant;
  data::Condition condition = data::Condition::Quiet;
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

struct EvalReport {
  EvalMode mode = EvalMode::MatchMismatch;
  double segment_s = 0.0;
  std::vector<AccuracyRow> rows;  // one per participant and condition
  std::vector<std::string> participants;
  std::vector<double> participant_accuracy;
  double mean = 0.0;    // participant average
  double margin = 0.0;  // 95% t-interval half-width across participants
  std::size_t examples = 0;
  std::size_t correct = 0;
};

// Decision: class 1 when the margin is positive, class 0 otherwise.
EvalReport summarize(const ScoreTable& table, const std::vector<double>& margins);

// Composite of an FFR ensemble and an envelope ensemble scored on the same
// examples (tables must list identical examples). p_f and p_e are the mean
// sigmoid outputs of each ensemble.
struct CompositeInputs {
  std::vector<Eigen::Vector2d> points;
  std::vector<int> labels;
};
CompositeInputs composite_inputs(const ScoreTable& ffr, const ScoreTable& envelope);

// Table with one "composite" instance whose logits are LDA scores.
ScoreTable composite_table(const LdaModel& model, const ScoreTable& ffr, const ScoreTable& envelope);

}  // namespace mmdec::analysis
