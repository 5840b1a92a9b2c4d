#include <cmath>
#include <string>

#include "mmdec/common/error.hpp"
#include "mmdec/common/log.hpp"
#include "mmdec/eeg/preprocess.hpp"

namespace mmdec::eeg {

ThresholdResult threshold_interpolate(const EegRecording& x, double thresh) {
  if (!(thresh > 0.0)) throw Error("threshold_interpolate: threshold must be positive");
  ThresholdResult result{x, ArtifactMask::empty(x.channels(), x.samples())};
  auto& data = result.recording.data;
  const Eigen::Index n = data.cols();

  // NaN compares false, so it is treated as a glitch too.
  const auto glitchy = [thresh](double v) { return !(std::abs(v) <= thresh); };

  for (Eigen::Index c = 0; c < data.rows(); ++c) {
    Eigen::Index i = 0;
    while (i < n) {
      if (!glitchy(data(c, i))) {
        ++i;
        continue;
      }
      Eigen::Index end = i;
      while (end < n && glitchy(data(c, end))) ++end;
      const Eigen::Index before = i - 1;
      for (Eigen::Index k = i; k < end; ++k) result.mask.flags(c, k) = true;

      if (before < 0 && end >= n) {
        log_warning("threshold_interpolate: channel " + x.layout.name(static_cast<std::size_t>(c)) +
                    " exceeds the threshold everywhere; zeroed");
        data.row(c).setZero();
      } else if (before < 0) {
        data.row(c).segment(i, end - i).setConstant(data(c, end));
      } else if (end >= n) {
        data.row(c).segment(i, end - i).setConstant(data(c, before));
      } else {
        const double a = data(c, before);
        const double b = data(c, end);
        const auto span = static_cast<double>(end - before);
        for (Eigen::Index k = i; k < end; ++k) {
          data(c, k) = a + (b - a) * static_cast<double>(k - before) / span;
        }
      }
      i = end;
    }
  }
  return result;
}

ArtifactMask frontal_power_mask(const EegRecording& x, double factor,
                                const std::vector<std::string>& frontal) {
  std::vector<Eigen::Index> rows;
  std::string missing;
  for (const auto& name : frontal) {
    if (const auto idx = x.layout.index_of(name)) {
      rows.push_back(static_cast<Eigen::Index>(*idx));
    } else {
      missing += (missing.empty() ? "" : ", ") + name;
    }
  }
  if (!missing.empty()) throw Error("frontal_power_mask: layout lacks frontal channels " + missing);
  if (rows.empty()) throw Error("frontal_power_mask: no frontal channels configured");

  const Eigen::Index n = x.data.cols();
  Eigen::RowVectorXd mean_frontal = Eigen::RowVectorXd::Zero(n);
  for (const auto r : rows) mean_frontal += x.data.row(r);
  mean_frontal /= static_cast<double>(rows.size());

  const Eigen::RowVectorXd power = mean_frontal.array().square();
  const double threshold = factor * (n > 0 ? power.mean() : 0.0);

  ArtifactMask mask = ArtifactMask::empty(x.channels(), x.samples());
  for (Eigen::Index t = 0; t < n; ++t) {
    mask.global_flags[static_cast<std::size_t>(t)] = power[t] > threshold;
  }
  return mask;
}

}  // namespace mmdec::eeg
