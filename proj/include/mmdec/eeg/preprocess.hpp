#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "mmdec/eeg/layout.hpp"

namespace mmdec::eeg {

// channels x samples
using SignalMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using FlagMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct EegRecording {
  SignalMatrix data;
  double rate = 0.0;
  ChannelLayout layout;
  std::string participant_id;
  std::string trial_id;

  std::size_t channels() const { return static_cast<std::size_t>(data.rows()); }
  std::size_t samples() const { return static_cast<std::size_t>(data.cols()); }

  // Throws if the channel count and layout disagree.
  void check_consistent() const;
};

struct ArtifactMask {
  FlagMatrix flags;                 // per (channel, sample) amplitude glitches
  std::vector<bool> global_flags;   // per sample, frontal-power events

  static ArtifactMask empty(std::size_t channels, std::size_t samples);
  std::size_t flagged_samples() const;
};

struct ThresholdResult {
  EegRecording recording;
  ArtifactMask mask;
};

inline constexpr double kDefaultGlitchVolts = 500e-6;
inline constexpr double kDefaultFrontalFactor = 5.0;
inline constexpr double kHighpassCutoffHz = 0.5;

std::vector<std::string> default_frontal_channels();

// First-order Butterworth highpass (-3 dB at 0.5 Hz), forward and backward.
EegRecording highpass_detrend(const EegRecording& x);

// Per-channel runs with |v| > thresh are replaced by the straight line between
// the clean samples bounding the run. Runs touching either end of the
// recording hold the nearest clean value.
ThresholdResult threshold_interpolate(const EegRecording& x, double thresh = kDefaultGlitchVolts);

// Flags samples where the squared mean of the frontal channels exceeds
// factor times its trial-average value.
ArtifactMask frontal_power_mask(const EegRecording& x, double factor = kDefaultFrontalFactor,
                                const std::vector<std::string>& frontal = default_frontal_channels());

// Multichannel Wiener filter fitted from clean and flagged samples of
// mask.global_flags, applied to the whole recording. Returns the input
// unchanged (with a warning) when either set is smaller than twice the
// channel count.
EegRecording mwf_suppress(const EegRecording& x, const ArtifactMask& mask);

EegRecording common_average_reference(const EegRecording& x);

// Reorders to the target layout. Target channels missing from the source are
// interpolated by inverse great-circle-distance weighting over the `neighbors`
// nearest source electrodes; source channels not in the target are dropped.
EegRecording map_layout(const EegRecording& x, const ChannelLayout& target,
                        std::size_t neighbors = 4);

EegRecording resample_recording(const EegRecording& x, double target_rate);

// Zero-phase Hamming FIR bandpass with a one-second impulse response.
EegRecording bandpass_recording(const EegRecording& x, double lo_hz, double hi_hz);

struct PipelineOptions {
  double glitch_volts = kDefaultGlitchVolts;
  double frontal_factor = kDefaultFrontalFactor;
  std::vector<std::string> frontal_channels = default_frontal_channels();
  // Applied after artifact handling and before re-referencing.
  std::optional<ChannelLayout> target_layout;
};

// highpass -> threshold/interpolate -> frontal mask -> MWF -> [layout] -> CAR -> 64 Hz
EegRecording preprocess_envelope_pipeline(const EegRecording& raw, const PipelineOptions& options = {});

// highpass -> threshold/interpolate -> [layout] -> CAR -> 70-220 Hz FIR -> 512 Hz
EegRecording preprocess_ffr_pipeline(const EegRecording& raw, const PipelineOptions& options = {});

}  // namespace mmdec::eeg
