#include "mmdec/analysis/lda.hpp"

#include <Eigen/LU>
#include <cmath>
#include <cstdio>

#include "mmdec/autodiff/ops.hpp"
#include "mmdec/common/error.hpp"

namespace mmdec::analysis {

std::string format_two_decimals(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

Eigen::Vector2d LdaModel::normalized_weights() const {
  const double sum = weights.sum();
  if (sum == 0.0) throw Error("LdaModel: weights sum to zero and cannot be normalised");
  return weights / sum;
}

double LdaModel::normalized_threshold() const { return offset / weights.sum(); }

std::string LdaModel::equation() const {
  const auto w = normalized_weights();
  const std::string sign = w[1] < 0.0 ? " - " : " + ";
  return format_two_decimals(w[0]) + " p_f" + sign + format_two_decimals(std::abs(w[1])) + " p_e = " +
         format_two_decimals(normalized_threshold());
}

LdaModel LdaModel::from_boundary(double w_f, double w_e, double threshold) {
  LdaModel m;
  m.weights = {w_f, w_e};
  m.offset = threshold;
  return m;
}

LdaModel lda_fit(const std::vector<Eigen::Vector2d>& points, const std::vector<int>& labels) {
  if (points.size() != labels.size()) throw Error("lda_fit: point and label counts differ");
  LdaModel m;
  std::size_t n0 = 0, n1 = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite()) throw Error("lda_fit: non-finite point");
    if (labels[i] == 1) {
      m.mean1 += points[i];
      ++n1;
    } else if (labels[i] == 0) {
      m.mean0 += points[i];
      ++n0;
    } else {
      throw Error("lda_fit: labels must be 0 or 1");
    }
  }
  if (n0 < 3 || n1 < 3) throw Error("lda_fit: need at least 3 points of each class");
  m.mean0 /= static_cast<double>(n0);
  m.mean1 /= static_cast<double>(n1);
  Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::Vector2d d = points[i] - (labels[i] == 1 ? m.mean1 : m.mean0);
    s += d * d.transpose();
  }
  s /= static_cast<double>(n0 + n1 - 2);
  s.diagonal().array() += 1e-6 * s.trace() / 2.0;
  m.covariance = s;
  const Eigen::FullPivLU<Eigen::Matrix2d> lu(s);
  if (!lu.isInvertible() || s.trace() == 0.0) throw Error("lda_fit: pooled covariance is singular");
  m.weights = lu.solve(m.mean1 - m.mean0);
  m.offset = m.weights.dot(m.mean0 + m.mean1) / 2.0;
  return m;
}

CompositePrediction composite_predict(const LdaModel& model, double p_f, double p_e) {
  const double s = model.score(p_f, p_e);
  return {autodiff::sigmoid_value(s), s > 0.0 ? 1 : 0};
}

}  // namespace mmdec::analysis
