#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace mmdec::analysis {

// Two-class linear discriminant on (p_f, p_e) points: the FFR decoder output
// first, the envelope decoder output second.
struct LdaModel {
  Eigen::Vector2d weights = Eigen::Vector2d::Zero();
  double offset = 0.0;
  Eigen::Vector2d mean0 = Eigen::Vector2d::Zero();
  Eigen::Vector2d mean1 = Eigen::Vector2d::Zero();
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();

  // w . p - c; positive scores favour class 1.
  double score(double p_f, double p_e) const { return weights[0] * p_f + weights[1] * p_e - offset; }

  // Weights scaled to sum to 1, with the matching threshold.
  Eigen::Vector2d normalized_weights() const;
  double normalized_threshold() const;
  // "0.39 p_f + 0.61 p_e = 0.5"
  std::string equation() const;

  // Model with decision boundary w_f p_f + w_e p_e = threshold.
  static LdaModel from_boundary(double w_f, double w_e, double threshold);
};

// Pooled-covariance LDA: w = S^-1 (mu1 - mu0), c = w . (mu0 + mu1) / 2, with
// S regularised by 1e-6 trace(S) / 2 on the diagonal. Needs at least 3 points
// per class; throws if the covariance stays singular.
LdaModel lda_fit(const std::vector<Eigen::Vector2d>& points, const std::vector<int>& labels);

struct CompositePrediction {
  double probability = 0.5;  // logistic of the score
  int decision = 0;          // 1 when the score is positive
};

CompositePrediction composite_predict(const LdaModel& model, double p_f, double p_e);

// Two decimals with trailing zeros removed ("0.50" -> "0.5").
std::string format_two_decimals(double v);

}  // namespace mmdec::analysis
