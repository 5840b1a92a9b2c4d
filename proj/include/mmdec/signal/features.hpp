#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mmdec::signal {

enum class FeatureKind { Envelope, EnvelopeModulations };

// 64 Hz for the envelope, 512 Hz for the envelope modulations.
double feature_rate(FeatureKind kind);
std::string to_string(FeatureKind kind);
FeatureKind parse_feature_kind(std::string_view text);

struct AudioWaveform {
  std::vector<double> samples;
  double rate = 0.0;
};

struct FeatureSeries {
  std::vector<double> samples;
  double rate = 0.0;
  FeatureKind kind = FeatureKind::Envelope;
};

// Broadband speech envelope: 28-band ERB-spaced gammatone bank (50 Hz - 5 kHz),
// full-wave rectification, power-law compression (0.6), band average,
// resampled to 64 Hz.
FeatureSeries extract_envelope(const AudioWaveform& audio);

// High-frequency envelope modulations at 512 Hz. The auditory spectrogram is
// approximated by a 24-band gammatone bank between 300 Hz and 4 kHz at 16 kHz
// with half-wave rectified sub-bands, lowpassed and sampled at 500 Hz. The
// band average is then bandpassed 70-220 Hz with a zero-phase Hamming FIR.
FeatureSeries extract_envelope_modulations(const AudioWaveform& audio);

}  // namespace mmdec::signal
