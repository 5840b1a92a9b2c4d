#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mmdec::analysis {

struct EnsemblePrediction {
  std::vector<std::string> instance_ids;
  std::vector<std::vector<double>> instance_probabilities;  // [instance][example]
  std::vector<double> averaged;                             // per example

  // Class 1 when the average exceeds 0.5; an exact tie gives class 0.
  int decision(std::size_t example) const { return averaged[example] > 0.5 ? 1 : 0; }
};

// Elementwise arithmetic mean of per-instance probabilities.
EnsemblePrediction average_sigmoids(const std::vector<std::vector<double>>& probabilities,
                                    std::vector<std::string> ids = {});

// Decision margin of an averaged ensemble, computed from logits as
// sum_i (sigmoid(z_i) - sigmoid(-z_i)). It has the sign of mean probability
// minus 0.5 and flips exactly when every logit is negated.
double ensemble_margin(const std::vector<double>& logits);

// Participant-average accuracy of the ensemble formed by the given instance
// subset. logits is [instance][example].
struct AccuracyTarget {
  std::vector<std::size_t> participant;  // per example, index into participants
  std::vector<int> labels;               // per example
  std::size_t participants = 0;
};

double participant_average_accuracy(const std::vector<std::vector<double>>& logits,
                                    const std::vector<std::size_t>& subset, const AccuracyTarget& target);

struct CurvePoint {
  std::size_t n = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> draws;
};

// For every n, draws random subsets of n instances (without replacement
// within a draw), averages their sigmoids and records participant-average
// accuracy. Throws if some n exceeds the instance count.
std::vector<CurvePoint> bootstrap_averaging_curve(const std::vector<std::vector<double>>& logits,
                                                  const AccuracyTarget& target, const std::vector<std::size_t>& n_values,
                                                  std::size_t draws, std::uint64_t seed);

}  // namespace mmdec::analysis
