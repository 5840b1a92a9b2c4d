#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mmdec/common/error.hpp"
#include "mmdec/eeg/preprocess.hpp"
#include "mmdec/signal/dsp.hpp"

namespace mmdec::eeg {
namespace {

std::vector<double> row_copy(const SignalMatrix& m, Eigen::Index r) {
  std::vector<double> v(static_cast<std::size_t>(m.cols()));
  Eigen::Map<Eigen::RowVectorXd>(v.data(), m.cols()) = m.row(r);
  return v;
}

EegRecording with_data(const EegRecording& x, SignalMatrix data, double rate) {
  EegRecording out;
  out.data = std::move(data);
  out.rate = rate;
  out.layout = x.layout;
  out.participant_id = x.participant_id;
  out.trial_id = x.trial_id;
  return out;
}

}  // namespace

void EegRecording::check_consistent() const {
  if (channels() != layout.size()) {
    throw Error("recording " + trial_id + " has " + std::to_string(channels()) +
                " channels but its layout lists " + std::to_string(layout.size()));
  }
}

ArtifactMask ArtifactMask::empty(std::size_t channels, std::size_t samples) {
  ArtifactMask m;
  m.flags = FlagMatrix::Constant(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(samples), false);
  m.global_flags.assign(samples, false);
  return m;
}

std::size_t ArtifactMask::flagged_samples() const {
  return static_cast<std::size_t>(std::count(global_flags.begin(), global_flags.end(), true));
}

std::vector<std::string> default_frontal_channels() { return {"Fp1", "Fp2", "AF3", "AF4", "Fz"}; }

EegRecording highpass_detrend(const EegRecording& x) {
  if (x.channels() == 0 || x.samples() == 0) throw Error("highpass_detrend: empty recording");
  if (!(x.rate >= 64.0)) throw Error("highpass_detrend: rate must be at least 64 Hz, got " + std::to_string(x.rate));
  const auto section = signal::butterworth1_highpass(kHighpassCutoffHz, x.rate);
  SignalMatrix out(x.data.rows(), x.data.cols());
  for (Eigen::Index c = 0; c < x.data.rows(); ++c) {
    const auto filtered = signal::filtfilt(section, row_copy(x.data, c));
    out.row(c) = Eigen::Map<const Eigen::RowVectorXd>(filtered.data(), x.data.cols());
  }
  return with_data(x, std::move(out), x.rate);
}

EegRecording common_average_reference(const EegRecording& x) {
  if (x.channels() < 2) throw Error("common_average_reference: need at least 2 channels");
  SignalMatrix out = x.data;
  const Eigen::RowVectorXd mean = x.data.colwise().mean();
  out.rowwise() -= mean;
  return with_data(x, std::move(out), x.rate);
}

EegRecording map_layout(const EegRecording& x, const ChannelLayout& target, std::size_t neighbors) {
  x.check_consistent();
  constexpr double kMaxAngle = 3.14159265358979323846 / 2.0;
  SignalMatrix out(static_cast<Eigen::Index>(target.size()), x.data.cols());

  for (std::size_t t = 0; t < target.size(); ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    if (const auto src = x.layout.index_of(target.name(t))) {
      out.row(row) = x.data.row(static_cast<Eigen::Index>(*src));
      continue;
    }
    std::vector<std::pair<double, std::size_t>> candidates;
    for (std::size_t s = 0; s < x.layout.size(); ++s) {
      const double d = angular_distance(target.position(t), x.layout.position(s));
      if (d <= kMaxAngle) candidates.emplace_back(d, s);
    }
    if (candidates.empty()) {
      throw Error("map_layout: no source electrode within 90 degrees of " + target.name(t));
    }
    const std::size_t k = std::min(neighbors, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end());

    out.row(row).setZero();
    if (candidates.front().first < 1e-12) {
      out.row(row) = x.data.row(static_cast<Eigen::Index>(candidates.front().second));
      continue;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) total += 1.0 / candidates[i].first;
    for (std::size_t i = 0; i < k; ++i) {
      const double w = (1.0 / candidates[i].first) / total;
      out.row(row) += w * x.data.row(static_cast<Eigen::Index>(candidates[i].second));
    }
  }

  EegRecording result = with_data(x, std::move(out), x.rate);
  result.layout = target;
  return result;
}

EegRecording resample_recording(const EegRecording& x, double target_rate) {
  if (x.rate == target_rate) return x;
  const auto n_out = static_cast<Eigen::Index>(signal::resampled_length(x.samples(), x.rate, target_rate));
  SignalMatrix out(x.data.rows(), n_out);
  for (Eigen::Index c = 0; c < x.data.rows(); ++c) {
    const auto y = signal::resample(row_copy(x.data, c), x.rate, target_rate);
    out.row(c) = Eigen::Map<const Eigen::RowVectorXd>(y.data(), n_out);
  }
  return with_data(x, std::move(out), target_rate);
}

EegRecording bandpass_recording(const EegRecording& x, double lo_hz, double hi_hz) {
  // One second of impulse response, rounded up to an odd length.
  const auto rate_samples = static_cast<std::size_t>(std::lround(x.rate));
  const std::size_t taps = rate_samples | 1u;
  const auto h = signal::design_fir_bandpass({lo_hz, hi_hz}, x.rate, taps);
  SignalMatrix out(x.data.rows(), x.data.cols());
  for (Eigen::Index c = 0; c < x.data.rows(); ++c) {
    const auto y = signal::fir_zero_phase(row_copy(x.data, c), h);
    out.row(c) = Eigen::Map<const Eigen::RowVectorXd>(y.data(), x.data.cols());
  }
  return with_data(x, std::move(out), x.rate);
}

}  // namespace mmdec::eeg
