#include "mmdec/analysis/ensemble.hpp"

#include <algorithm>
#include <numeric>

#include "mmdec/autodiff/ops.hpp"
#include "mmdec/common/error.hpp"
#include "mmdec/common/rng.hpp"

namespace mmdec::analysis {

EnsemblePrediction average_sigmoids(const std::vector<std::vector<double>>& probabilities,
                                    std::vector<std::string> ids) {
  if (probabilities.empty()) throw Error("average_sigmoids: need at least one instance");
  const std::size_t n = probabilities.front().size();
  for (const auto& p : probabilities) {
    if (p.size() != n) throw Error("average_sigmoids: instances have different example counts");
  }
  if (ids.empty()) {
    for (std::size_t i = 0; i < probabilities.size(); ++i) ids.push_back("instance_" + std::to_string(i));
  }
  if (ids.size() != probabilities.size()) throw Error("average_sigmoids: id count differs from instance count");
  EnsemblePrediction out{std::move(ids), probabilities, std::vector<double>(n, 0.0)};
  for (std::size_t e = 0; e < n; ++e) {
    double s = 0.0;
    for (const auto& p : probabilities) s += p[e];
    out.averaged[e] = s / static_cast<double>(probabilities.size());
  }
  return out;
}

double ensemble_margin(const std::vector<double>& logits) {
  double m = 0.0;
  for (const double z : logits) m += autodiff::sigmoid_value(z) - autodiff::sigmoid_value(-z);
  return m;
}

double participant_average_accuracy(const std::vector<std::vector<double>>& logits,
                                    const std::vector<std::size_t>& subset, const AccuracyTarget& target) {
  if (subset.empty()) throw Error("participant_average_accuracy: empty instance subset");
  const std::size_t n = target.labels.size();
  std::vector<double> correct(target.participants, 0.0), total(target.participants, 0.0);
  std::vector<double> z(subset.size());
  for (std::size_t e = 0; e < n; ++e) {
    for (std::size_t k = 0; k < subset.size(); ++k) z[k] = logits.at(subset[k]).at(e);
    const int predicted = ensemble_margin(z) > 0.0 ? 1 : 0;
    total[target.participant[e]] += 1.0;
    if (predicted == target.labels[e]) correct[target.participant[e]] += 1.0;
  }
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t p = 0; p < target.participants; ++p) {
    if (total[p] == 0.0) continue;
    sum += correct[p] / total[p];
    ++counted;
  }
  if (counted == 0) throw Error("participant_average_accuracy: no examples");
  return sum / static_cast<double>(counted);
}

std::vector<CurvePoint> bootstrap_averaging_curve(const std::vector<std::vector<double>>& logits,
                                                  const AccuracyTarget& target, const std::vector<std::size_t>& n_values,
                                                  std::size_t draws, std::uint64_t seed) {
  if (draws == 0) throw Error("bootstrap_averaging_curve: draws must be positive");
  std::vector<CurvePoint> curve;
  const Rng root = Rng(seed).derive("bootstrap");
  for (const std::size_t n : n_values) {
    if (n == 0 || n > logits.size()) {
      throw Error("bootstrap_averaging_curve: cannot draw " + std::to_string(n) + " of " +
                  std::to_string(logits.size()) + " instances");
    }
    Rng rng = root.derive(n);
    CurvePoint point{n, 0.0, 0.0, 0.0, {}};
    std::vector<std::size_t> pool(logits.size());
    for (std::size_t d = 0; d < draws; ++d) {
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      // Partial Fisher-Yates: the first n entries form the draw.
      for (std::size_t i = 0; i < n; ++i) std::swap(pool[i], pool[i + rng.index(pool.size() - i)]);
      std::vector<std::size_t> subset(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
      std::sort(subset.begin(), subset.end());
      point.draws.push_back(participant_average_accuracy(logits, subset, target));
    }
    point.mean = std::accumulate(point.draws.begin(), point.draws.end(), 0.0) / static_cast<double>(draws);
    point.min = *std::min_element(point.draws.begin(), point.draws.end());
    point.max = *std::max_element(point.draws.begin(), point.draws.end());
    curve.push_back(std::move(point));
  }
  return curve;
}

}  // namespace mmdec::analysis
