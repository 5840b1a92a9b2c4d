#include "mmdec/signal/features.hpp"

#include <algorithm>
#include <cmath>

#include "mmdec/common/error.hpp"
#include "mmdec/signal/dsp.hpp"
#include "mmdec/signal/gammatone.hpp"

namespace mmdec::signal {
namespace {

constexpr std::size_t kEnvelopeBands = 28;
constexpr double kEnvelopeLoHz = 50.0;
constexpr double kEnvelopeHiHz = 5000.0;
constexpr double kCompression = 0.6;

constexpr double kModulationInputRate = 16000.0;
constexpr std::size_t kSpectrogramBands = 24;
constexpr double kSpectrogramLoHz = 300.0;
constexpr double kSpectrogramHiHz = 4000.0;
constexpr double kSpectrogramRate = 500.0;
constexpr Band kPitchBand{70.0, 220.0};
constexpr std::size_t kPitchBandTaps = 249;

void validate(const AudioWaveform& audio, const char* what) {
  if (audio.samples.empty()) throw Error(std::string(what) + ": empty waveform");
  if (!(audio.rate > 0.0)) throw Error(std::string(what) + ": sample rate must be positive");
  if (!std::all_of(audio.samples.begin(), audio.samples.end(),
                   [](double v) { return std::isfinite(v); })) {
    throw Error(std::string(what) + ": waveform contains non-finite samples");
  }
}

}  // namespace

double feature_rate(FeatureKind kind) {
  return kind == FeatureKind::Envelope ? 64.0 : 512.0;
}

std::string to_string(FeatureKind kind) {
  return kind == FeatureKind::Envelope ? "envelope" : "modulations";
}

FeatureKind parse_feature_kind(std::string_view text) {
  if (text == "envelope" || text == "env") return FeatureKind::Envelope;
  if (text == "modulations" || text == "ffr") return FeatureKind::EnvelopeModulations;
  throw Error("unknown feature kind '" + std::string(text) + "' (expected envelope or ffr)");
}

FeatureSeries extract_envelope(const AudioWaveform& audio) {
  validate(audio, "extract_envelope");
  const auto bank = design_gammatone_bank(kEnvelopeBands, kEnvelopeLoHz, kEnvelopeHiHz, audio.rate);

  std::vector<double> mean(audio.samples.size(), 0.0);
  for (const auto& filter : bank.filters) {
    const auto band = apply_gammatone(filter, bank.order, audio.samples);
    for (std::size_t i = 0; i < band.size(); ++i) mean[i] += std::pow(std::abs(band[i]), kCompression);
  }
  const double scale = 1.0 / static_cast<double>(bank.filters.size());
  for (double& v : mean) v *= scale;

  FeatureSeries out;
  out.kind = FeatureKind::Envelope;
  out.rate = feature_rate(FeatureKind::Envelope);
  out.samples = resample(mean, audio.rate, out.rate);
  // The resampling kernel can undershoot near sharp onsets.
  for (double& v : out.samples) v = std::max(v, 0.0);
  return out;
}

FeatureSeries extract_envelope_modulations(const AudioWaveform& audio) {
  validate(audio, "extract_envelope_modulations");
  const std::vector<double> x = resample(audio.samples, audio.rate, kModulationInputRate);
  const auto bank =
      design_gammatone_bank(kSpectrogramBands, kSpectrogramLoHz, kSpectrogramHiHz, kModulationInputRate);

  std::vector<double> mean(x.size(), 0.0);
  for (const auto& filter : bank.filters) {
    const auto band = apply_gammatone(filter, bank.order, x);
    for (std::size_t i = 0; i < band.size(); ++i) mean[i] += std::max(band[i], 0.0);
  }
  const double scale = 1.0 / static_cast<double>(bank.filters.size());
  for (double& v : mean) v *= scale;

  // The resampler's anti-alias lowpass doubles as the spectrogram smoothing.
  const auto spectrogram = resample(mean, kModulationInputRate, kSpectrogramRate);
  const auto pitch_band = fir_zero_phase(spectrogram, kSpectrogramRate, kPitchBand, kPitchBandTaps);

  FeatureSeries out;
  out.kind = FeatureKind::EnvelopeModulations;
  out.rate = feature_rate(FeatureKind::EnvelopeModulations);
  out.samples = resample(pitch_band, kSpectrogramRate, out.rate);
  return out;
}

}  // namespace mmdec::signal
