#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mmdec/data/manifest.hpp"

namespace mmdec::data {

// Parameters of the synthetic benchmark. The stimulus of every trial is
// random: a smoothed positive coloured noise at 64 Hz for the envelope kind,
// 70-220 Hz band-limited noise at 512 Hz for the modulations kind. The EEG is
// a per-participant spatial mixing of the delayed, lowpass-shaped stimulus
// plus 1/f noise at the requested per-channel SNR.
struct SynthSpec {
  std::string name = "synthetic";
  std::size_t participants = 20;
  double minutes_per_participant = 10.0;
  double trial_minutes = 5.0;
  double snr_db = -24.0;
  double modulations_snr_db = -28.0;
  std::uint64_t seed = 0;
  std::vector<FeatureKind> kinds = {FeatureKind::Envelope};
  // Competing-speaker trials per participant; attended stream gain relative
  // to the ignored stream.
  double competing_minutes = 2.0;
  double gain_ratio = 2.0;
  // Relative size of the per-participant deviation from the shared topography.
  double topography_spread = 0.5;
  // Fraction of the noise power shared across channels through random
  // spatial sources.
  double correlated_noise_fraction = 0.5;
  // Writes 16 kHz audio and 1024 Hz raw EEG instead of decoder-rate files
  // (envelope kind only); `preprocess` then produces the aligned files.
  bool raw = false;

  // Throws mmdec::Error on non-finite SNRs or empty sizes.
  void validate() const;
};

// Hidden generative parameters of one participant, exposed for tests.
struct SynthParticipant {
  std::string id;
  std::vector<double> topography;  // per channel, unit RMS
  double envelope_delay_s = 0.0;
  double modulations_delay_s = 0.0;
};

SynthParticipant synth_participant(const SynthSpec& spec, std::size_t index);

// Writes all files below `out_dir` and returns the manifest (also written to
// out_dir/manifest.json).
DatasetManifest synth_generate(const SynthSpec& spec, const std::filesystem::path& out_dir);

}  // namespace mmdec::data
