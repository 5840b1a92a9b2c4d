#include "mmdec/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmdec/common/error.hpp"
#include "mmdec/common/log.hpp"
#include "mmdec/common/rng.hpp"
#include "mmdec/data/timeseries_io.hpp"
#include "mmdec/eeg/layout.hpp"
#include "mmdec/signal/dsp.hpp"

namespace mmdec::data {

namespace {

constexpr double kAudioRate = 16000.0;
constexpr double kRawEegRate = 1024.0;
constexpr double kRawEegVolts = 10e-6;
constexpr std::size_t kNoiseSources = 8;

std::vector<double> white(Rng& rng, std::size_t n) {
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

void standardize(std::vector<double>& x) {
  double mean = 0.0;
  for (const double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (const double v : x) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(x.size()));
  for (auto& v : x) v = sd > 0.0 ? (v - mean) / sd : 0.0;
}

// 1/f noise from a bank of first-order lowpass sections (Kellet's filter).
std::vector<double> pink(Rng& rng, std::size_t n) {
  std::vector<double> y(n);
  double b[7] = {};
  for (std::size_t i = 0; i < n; ++i) {
    const double w = rng.normal();
    b[0] = 0.99886 * b[0] + w * 0.0555179;
    b[1] = 0.99332 * b[1] + w * 0.0750759;
    b[2] = 0.96900 * b[2] + w * 0.1538520;
    b[3] = 0.86650 * b[3] + w * 0.3104856;
    b[4] = 0.55000 * b[4] + w * 0.5329522;
    b[5] = -0.7616 * b[5] - w * 0.0168980;
    y[i] = b[0] + b[1] + b[2] + b[3] + b[4] + b[5] + b[6] + w * 0.5362;
    b[6] = w * 0.115926;
  }
  return y;
}

std::vector<double> stimulus_feature(Rng& rng, FeatureKind kind, std::size_t n) {
  const double rate = signal::feature_rate(kind);
  if (kind == FeatureKind::Envelope) {
    auto x = signal::fir_zero_phase(white(rng, n), rate, {0.5, 8.0}, 129);
    standardize(x);
    for (auto& v : x) v = std::exp(0.5 * v);
    return x;
  }
  auto x = signal::fir_zero_phase(white(rng, n), rate, {70.0, 220.0}, 257);
  standardize(x);
  return x;
}

// Response of the auditory system: a delayed, lowpass-shaped copy of the
// zero-mean stimulus. The kernel is a Hann window of the given width.
std::vector<double> neural_response(const std::vector<double>& stim, double rate, double delay_s, double width_s) {
  std::vector<double> s = stim;
  double mean = 0.0;
  for (const double v : s) mean += v;
  mean /= static_cast<double>(s.size());
  for (auto& v : s) v -= mean;

  const auto width = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(width_s * rate)));
  std::vector<double> h(width);
  double total = 0.0;
  for (std::size_t k = 0; k < width; ++k) {
    h[k] = std::sin(std::acos(-1.0) * (static_cast<double>(k) + 0.5) / static_cast<double>(width));
    h[k] *= h[k];
    total += h[k];
  }
  for (auto& v : h) v /= total;
  const auto delay = static_cast<std::ptrdiff_t>(std::lround(delay_s * rate));
  const auto n = static_cast<std::ptrdiff_t>(s.size());
  std::vector<double> r(s.size(), 0.0);
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    double acc = 0.0;
    for (std::size_t k = 0; k < width; ++k) {
      const std::ptrdiff_t src = t - delay - static_cast<std::ptrdiff_t>(k);
      if (src >= 0) acc += h[k] * s[static_cast<std::size_t>(src)];
    }
    r[static_cast<std::size_t>(t)] = acc;
  }
  return r;
}

double power(const std::vector<double>& x) {
  double p = 0.0;
  for (const double v : x) p += v * v;
  return p / static_cast<double>(x.size());
}

struct TrialPlan {
  std::string id;
  Condition condition;
  std::size_t seconds;
};

std::vector<TrialPlan> plan_trials(const SynthSpec& spec, const std::string& participant) {
  std::vector<TrialPlan> plan;
  const double total = spec.minutes_per_participant * 60.0;
  const double per_trial = spec.trial_minutes * 60.0;
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(total / per_trial - 1e-9)));
  double remaining = total;
  for (std::size_t i = 0; i < n; ++i) {
    const double len = std::min(per_trial, remaining);
    remaining -= len;
    plan.push_back({participant + "-T" + std::to_string(i + 1), Condition::Quiet,
                    static_cast<std::size_t>(std::lround(len))});
  }
  if (spec.competing_minutes > 0.0) {
    plan.push_back({participant + "-C1", Condition::Competing,
                    static_cast<std::size_t>(std::lround(spec.competing_minutes * 60.0))});
  }
  return plan;
}

std::string two_digits(std::size_t i) { return (i < 10 ? "0" : "") + std::to_string(i); }

std::vector<float> to_float(const std::vector<double>& x) { return {x.begin(), x.end()}; }

// channels x samples EEG for one kind: mixed responses plus scaled noise.
std::vector<float> synth_eeg(const SynthSpec& spec, const SynthParticipant& p, Rng rng, FeatureKind kind,
                             const std::vector<std::vector<double>>& responses, const std::vector<double>& gains,
                             double noise_reference_power) {
  const std::size_t channels = p.topography.size();
  const std::size_t n = responses.front().size();
  const double rate = signal::feature_rate(kind);
  const double snr = kind == FeatureKind::Envelope ? spec.snr_db : spec.modulations_snr_db;

  std::vector<double> source(n, 0.0);
  for (std::size_t s = 0; s < responses.size(); ++s)
    for (std::size_t i = 0; i < n; ++i) source[i] += gains[s] * responses[s][i];

  // Noise: shared spatial sources plus independent channel noise, each
  // normalised to unit power before mixing.
  const double noise_power = noise_reference_power / std::pow(10.0, snr / 10.0);
  std::vector<std::vector<double>> shared;
  std::vector<std::vector<double>> mixing(kNoiseSources, std::vector<double>(channels));
  for (std::size_t k = 0; k < kNoiseSources; ++k) {
    auto v = pink(rng, n);
    standardize(v);
    shared.push_back(std::move(v));
    double norm = 0.0;
    for (auto& m : mixing[k]) {
      m = rng.normal();
      norm += m * m;
    }
    for (auto& m : mixing[k]) m /= std::sqrt(norm / static_cast<double>(channels) * kNoiseSources);
  }
  const double shared_gain = std::sqrt(spec.correlated_noise_fraction * noise_power);
  const double own_gain = std::sqrt((1.0 - spec.correlated_noise_fraction) * noise_power);

  std::vector<float> eeg(channels * n);
  for (std::size_t c = 0; c < channels; ++c) {
    auto v = pink(rng, n);
    standardize(v);
    for (std::size_t i = 0; i < n; ++i) {
      double x = p.topography[c] * source[i] + own_gain * v[i];
      for (std::size_t k = 0; k < kNoiseSources; ++k) x += shared_gain * mixing[k][c] * shared[k][i];
      v[i] = x;
    }
    if (kind == FeatureKind::Envelope) {
      v = signal::highpass_zero_phase(v, rate, 0.5);
    } else {
      v = signal::fir_zero_phase(v, rate, {70.0, 220.0}, 257);
    }
    std::copy(v.begin(), v.end(), eeg.begin() + static_cast<std::ptrdiff_t>(c * n));
  }
  return eeg;
}

}  // namespace

void SynthSpec::validate() const {
  if (participants == 0) throw Error("synth: participants must be positive");
  if (!(minutes_per_participant > 0.0) || !(trial_minutes > 0.0)) throw Error("synth: durations must be positive");
  if (minutes_per_participant * 60.0 < 10.0) throw Error("synth: trials must be at least 10 s long");
  if (!(competing_minutes >= 0.0)) throw Error("synth: competing_minutes must be non-negative");
  if (!std::isfinite(snr_db) || !std::isfinite(modulations_snr_db)) throw Error("synth: SNR must be finite");
  if (!(gain_ratio > 0.0) || !std::isfinite(gain_ratio)) throw Error("synth: gain_ratio must be positive");
  if (!(topography_spread >= 0.0)) throw Error("synth: topography_spread must be non-negative");
  if (!(correlated_noise_fraction >= 0.0 && correlated_noise_fraction <= 1.0)) {
    throw Error("synth: correlated_noise_fraction must lie in [0, 1]");
  }
  if (kinds.empty()) throw Error("synth: at least one feature kind is required");
  if (raw && (kinds.size() != 1 || kinds[0] != FeatureKind::Envelope)) {
    throw Error("synth: raw output supports the envelope kind only");
  }
}

SynthParticipant synth_participant(const SynthSpec& spec, std::size_t index) {
  const Rng root(spec.seed);
  Rng shared = root.derive("topography");
  Rng own = root.derive("participant").derive(index);
  const std::size_t channels = eeg::ChannelLayout::biosemi64().size();
  SynthParticipant p;
  p.id = "P" + two_digits(index + 1);
  p.topography.resize(channels);
  double norm = 0.0;
  for (std::size_t c = 0; c < channels; ++c) {
    p.topography[c] = shared.normal() + spec.topography_spread * own.normal();
    norm += p.topography[c] * p.topography[c];
  }
  norm = std::sqrt(norm / static_cast<double>(channels));
  for (auto& v : p.topography) v /= norm;
  p.envelope_delay_s = own.uniform(0.100, 0.300);
  p.modulations_delay_s = own.uniform(0.005, 0.015);
  return p;
}

DatasetManifest synth_generate(const SynthSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  std::filesystem::create_directories(out_dir);
  const auto layout = eeg::ChannelLayout::biosemi64();
  DatasetManifest manifest;
  manifest.name = spec.name;
  manifest.layout = "biosemi64";
  manifest.base_dir = out_dir;

  const Rng root(spec.seed);
  for (std::size_t pi = 0; pi < spec.participants; ++pi) {
    const auto participant = synth_participant(spec, pi);
    Rng prng = root.derive("trials").derive(pi);
    const bool female = prng.uniform() < 0.5;
    const Narrator narrator{female ? "female" : "male", female ? prng.uniform(170.0, 230.0) : prng.uniform(95.0, 135.0)};
    std::filesystem::create_directories(out_dir / participant.id);

    std::size_t ti = 0;
    for (const auto& plan : plan_trials(spec, participant.id)) {
      Rng trng = prng.derive(ti++);
      TrialRecord rec;
      rec.participant_id = participant.id;
      rec.trial_id = plan.id;
      rec.condition = plan.condition;
      rec.narrator = narrator;
      const std::size_t n_streams = plan.condition == Condition::Competing ? 2 : 1;
      rec.streams.resize(n_streams);
      const std::vector<double> gains =
          n_streams == 2 ? std::vector<double>{1.0, 1.0 / spec.gain_ratio} : std::vector<double>{1.0};
      const auto rel = [&](const std::string& stem) { return participant.id + "/" + plan.id + "_" + stem + ".tsb"; };

      for (const auto kind : spec.kinds) {
        Rng krng = trng.derive(signal::to_string(kind));
        const double rate = signal::feature_rate(kind);
        const auto n = static_cast<std::size_t>(plan.seconds) * static_cast<std::size_t>(rate);
        const double delay = kind == FeatureKind::Envelope ? participant.envelope_delay_s
                                                           : participant.modulations_delay_s;
        const double width = kind == FeatureKind::Envelope ? 0.1 : 0.004;
        std::vector<std::vector<double>> stims, responses;
        for (std::size_t s = 0; s < n_streams; ++s) {
          Rng srng = krng.derive("stream").derive(s);
          stims.push_back(stimulus_feature(srng, kind, n));
          responses.push_back(neural_response(stims.back(), rate, delay, width));
        }
        const double reference = power(responses[0]);
        auto eeg_values = synth_eeg(spec, participant, krng.derive("noise"), kind, responses, gains, reference);
        const std::string tag = kind == FeatureKind::Envelope ? "envelope" : "modulations";

        if (spec.raw) {
          // Audio: noise carrier modulated by the envelope stimulus.
          for (std::size_t s = 0; s < n_streams; ++s) {
            Rng arng = krng.derive("audio").derive(s);
            auto env = signal::resample(stims[s], rate, kAudioRate);
            for (auto& v : env) v = std::max(0.0, v) * 0.05 * arng.normal();
            const auto path = rel("stream" + std::to_string(s) + "_audio");
            write_timeseries(manifest.resolve(path), make_timeseries(to_float(env), kAudioRate, "audio"));
            rec.streams[s].audio = path;
          }
          Timeseries raw{kRawEegRate, layout.names(), 0, {}};
          Rng drng = krng.derive("drift");
          for (std::size_t c = 0; c < layout.size(); ++c) {
            const std::vector<double> row(eeg_values.begin() + static_cast<std::ptrdiff_t>(c * n),
                                          eeg_values.begin() + static_cast<std::ptrdiff_t>((c + 1) * n));
            auto up = signal::resample(row, rate, kRawEegRate);
            const double offset = drng.normal(0.0, 20e-6);
            for (auto& v : up) v = v * kRawEegVolts + offset;
            raw.samples = up.size();
            raw.values.insert(raw.values.end(), up.begin(), up.end());
          }
          rec.eeg.raw = rel("eeg_raw");
          write_timeseries(manifest.resolve(rec.eeg.raw), raw);
          continue;
        }

        for (std::size_t s = 0; s < n_streams; ++s) {
          const auto path = rel("stream" + std::to_string(s) + "_" + tag);
          write_timeseries(manifest.resolve(path), make_timeseries(to_float(stims[s]), rate, tag));
          rec.streams[s].feature(kind) = path;
        }
        rec.eeg.aligned(kind) = rel("eeg_" + tag);
        write_timeseries(manifest.resolve(rec.eeg.aligned(kind)),
                         Timeseries{rate, layout.names(), n, std::move(eeg_values)});
      }
      manifest.trials.push_back(std::move(rec));
    }
    log_info("synth: wrote participant " + participant.id);
  }
  write_manifest(out_dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace mmdec::data
