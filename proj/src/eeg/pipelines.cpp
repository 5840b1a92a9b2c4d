#include "mmdec/common/error.hpp"
#include "mmdec/eeg/preprocess.hpp"

namespace mmdec::eeg {
namespace {

constexpr double kEnvelopeRate = 64.0;
constexpr double kFfrRate = 512.0;
constexpr double kFfrLoHz = 70.0;
constexpr double kFfrHiHz = 220.0;

EegRecording maybe_map(EegRecording x, const PipelineOptions& options) {
  if (!options.target_layout || *options.target_layout == x.layout) return x;
  return map_layout(x, *options.target_layout);
}

}  // namespace

EegRecording preprocess_envelope_pipeline(const EegRecording& raw, const PipelineOptions& options) {
  raw.check_consistent();
  EegRecording x = highpass_detrend(raw);
  x = threshold_interpolate(x, options.glitch_volts).recording;
  const ArtifactMask frontal = frontal_power_mask(x, options.frontal_factor, options.frontal_channels);
  x = mwf_suppress(x, frontal);
  x = maybe_map(std::move(x), options);
  x = common_average_reference(x);
  return resample_recording(x, kEnvelopeRate);
}

EegRecording preprocess_ffr_pipeline(const EegRecording& raw, const PipelineOptions& options) {
  raw.check_consistent();
  if (!(raw.rate / 2.0 > kFfrHiHz)) {
    throw Error("preprocess_ffr_pipeline: source rate must exceed 440 Hz");
  }
  EegRecording x = highpass_detrend(raw);
  x = threshold_interpolate(x, options.glitch_volts).recording;
  x = maybe_map(std::move(x), options);
  x = common_average_reference(x);
  x = bandpass_recording(x, kFfrLoHz, kFfrHiHz);
  return resample_recording(x, kFfrRate);
}

}  // namespace mmdec::eeg
