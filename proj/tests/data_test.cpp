#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "mmdec/common/binary_io.hpp"
#include "mmdec/common/error.hpp"
#include "mmdec/data/dataset.hpp"
#include "mmdec/data/manifest.hpp"
#include "mmdec/data/run_config.hpp"
#include "mmdec/data/synth.hpp"
#include "mmdec/data/timeseries_io.hpp"

namespace mmdec::data {
namespace {

class DataTest : public ::testing::Test {
 protected:
  std::filesystem::path dir_ = std::filesystem::temp_directory_path() / "mmdec_data_test";
  void SetUp() override {
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
};

Timeseries sample_series() {
  Timeseries ts{64.0, {"Fz", "Cz", "Pz"}, 5, {}};
  for (std::size_t i = 0; i < 15; ++i) ts.values.push_back(static_cast<float>(i) * 0.25f - 1.0f);
  ts.values[7] = std::numeric_limits<float>::denorm_min();
  ts.values[8] = -0.0f;
  return ts;
}

TEST_F(DataTest, TimeseriesRoundTripIsBitExact) {
  const auto ts = sample_series();
  write_timeseries(dir_ / "a.tsb", ts);
  const auto back = read_timeseries(dir_ / "a.tsb");
  EXPECT_EQ(back.rate, ts.rate);
  EXPECT_EQ(back.names, ts.names);
  ASSERT_EQ(back.values.size(), ts.values.size());
  for (std::size_t i = 0; i < ts.values.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint32_t>(back.values[i]), std::bit_cast<std::uint32_t>(ts.values[i]));
  }
  EXPECT_EQ(encode_timeseries(back), read_file(dir_ / "a.tsb"));
}

TEST_F(DataTest, PayloadIsFourBytesPerValue) {
  const auto bytes = encode_timeseries(sample_series());
  const auto header_end = bytes.find('\n');
  ASSERT_NE(header_end, std::string::npos);
  EXPECT_EQ(bytes.size() - header_end - 1, 4u * 3u * 5u);
  EXPECT_NE(bytes.find("\"encoding\":\"f32le\""), std::string::npos);
}

TEST_F(DataTest, TruncatedPayloadNamesExpectedAndFoundCounts) {
  const auto bytes = encode_timeseries(sample_series());
  try {
    decode_timeseries(bytes.substr(0, bytes.size() - 4), "cut.tsb");
    FAIL() << "no exception";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("60"), std::string::npos) << msg;
    EXPECT_NE(msg.find("56"), std::string::npos) << msg;
  }
  auto bad = bytes;
  bad.replace(bad.find("f32le"), 5, "f64le");
  EXPECT_THROW(decode_timeseries(bad), DataError);
  EXPECT_THROW(decode_timeseries("no header"), DataError);
  EXPECT_THROW(read_timeseries(dir_ / "missing.tsb"), DataError);
}

TEST(Splits, PortionsPartitionEveryTrialOnWholeSeconds) {
  const SplitFractions f;
  for (const double rate : {64.0, 512.0}) {
    for (const std::size_t seconds : {7u, 10u, 60u, 119u, 300u}) {
      for (const std::size_t extra : {0u, 13u}) {
        const std::size_t n = seconds * static_cast<std::size_t>(rate) + extra;
        const auto tr = portion_range(n, rate, f, Portion::Train);
        const auto va = portion_range(n, rate, f, Portion::Validation);
        const auto te = portion_range(n, rate, f, Portion::Test);
        EXPECT_EQ(tr.first, 0u);
        EXPECT_EQ(tr.second, va.first);
        EXPECT_EQ(va.second, te.first);
        EXPECT_EQ(te.second, n);
        EXPECT_EQ(tr.second % static_cast<std::size_t>(rate), 0u);
        EXPECT_EQ(va.second % static_cast<std::size_t>(rate), 0u);
      }
    }
  }
  const auto tr = portion_range(600 * 64, 64.0, f, Portion::Train);
  EXPECT_EQ(tr.second, 480u * 64u);
  EXPECT_EQ(portion_range(600 * 64, 64.0, f, Portion::Validation).second, 540u * 64u);
}

TrialRecord trial(std::string p, std::string id) {
  TrialRecord t;
  t.participant_id = std::move(p);
  t.trial_id = std::move(id);
  t.streams.resize(1);
  return t;
}

TEST_F(DataTest, ManifestRoundTripAndValidation) {
  DatasetManifest m;
  m.name = "demo";
  m.trials.push_back(trial("P1", "a"));
  auto noise = trial("P1", "b");
  noise.condition = Condition::Noise;
  noise.snr_db = -5.0;
  noise.narrator = {"female", 201.5};
  noise.eeg.envelope = "x/eeg.tsb";
  noise.streams[0].envelope = "x/env.tsb";
  m.trials.push_back(noise);
  auto comp = trial("P2", "c");
  comp.condition = Condition::Competing;
  comp.streams.resize(2);
  m.trials.push_back(comp);
  write_manifest(dir_ / "m.json", m);
  const auto back = read_manifest(dir_ / "m.json");
  EXPECT_EQ(back.name, "demo");
  EXPECT_EQ(back.trials, m.trials);
  EXPECT_EQ(back.participants(), (std::vector<std::string>{"P1", "P2"}));
  EXPECT_EQ(back.resolve("x/env.tsb"), dir_ / "x/env.tsb");

  auto dup = m;
  dup.trials.push_back(trial("P3", "a"));
  EXPECT_THROW(dup.validate(), DataError);
  auto one_stream = m;
  one_stream.trials[2].streams.resize(1);
  EXPECT_THROW(one_stream.validate(), DataError);
  auto fractions = m;
  fractions.splits.test = 0.2;
  EXPECT_THROW(fractions.validate(), DataError);
  EXPECT_THROW(parse_condition("loud"), DataError);
}

TEST(RunConfigText, DefaultsRoundTripAndUnknownKeysFail) {
  const RunConfig defaults;
  EXPECT_EQ(RunConfig::parse(defaults.to_text()), defaults);
  const auto c = RunConfig::parse("# comment\nfeature = modulations\nlearning_rate = 0.0005\n"
                                  "eval_segments = 3, 5, 10\nensemble_sizes=1,2\n");
  EXPECT_EQ(c.feature, FeatureKind::EnvelopeModulations);
  EXPECT_EQ(c.learning_rate, 0.0005);
  EXPECT_EQ(c.eval_segments, (std::vector<double>{3.0, 5.0, 10.0}));
  EXPECT_EQ(c.ensemble_sizes, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(RunConfig::parse(c.to_text()), c);
  EXPECT_NE(c.to_text().find("learning_rate = 0.0005\n"), std::string::npos);
  EXPECT_THROW(RunConfig::parse("learning_rat = 1"), DataError);
  EXPECT_THROW(RunConfig::parse("batch_size = many"), DataError);
  EXPECT_THROW(RunConfig::parse("batch_size = 127"), DataError);
  EXPECT_THROW(RunConfig::parse("stride_seconds = 4"), DataError);
  EXPECT_THROW(RunConfig::parse("just words"), DataError);
  EXPECT_EQ(RunConfig::keys().size(), 21u);
}

SynthSpec small_spec() {
  SynthSpec s;
  s.participants = 2;
  s.minutes_per_participant = 0.5;
  s.trial_minutes = 0.25;
  s.competing_minutes = 0.25;
  s.kinds = {FeatureKind::Envelope, FeatureKind::EnvelopeModulations};
  return s;
}

TEST_F(DataTest, SynthIsDeterministicAndLoadable) {
  const auto a = synth_generate(small_spec(), dir_ / "a");
  const auto b = synth_generate(small_spec(), dir_ / "b");
  ASSERT_EQ(a.trials.size(), 6u);
  EXPECT_EQ(a.trials, b.trials);
  for (const auto& t : a.trials) {
    EXPECT_EQ(read_file(a.resolve(t.eeg.envelope)), read_file(b.resolve(t.eeg.envelope)));
    EXPECT_EQ(read_file(a.resolve(t.streams[0].modulations)), read_file(b.resolve(t.streams[0].modulations)));
  }
  EXPECT_EQ(read_file(dir_ / "a/manifest.json"), read_file(dir_ / "b/manifest.json"));

  auto other = small_spec();
  other.seed = 1;
  const auto c = synth_generate(other, dir_ / "c");
  EXPECT_NE(read_file(c.resolve(c.trials[0].eeg.envelope)), read_file(a.resolve(a.trials[0].eeg.envelope)));

  const auto ds = load_dataset(read_manifest(dir_ / "a/manifest.json"), FeatureKind::Envelope);
  ASSERT_EQ(ds.trials.size(), 6u);
  EXPECT_EQ(ds.trials[0].channels, 64u);
  EXPECT_EQ(ds.trials[0].samples, 15u * 64u);
  EXPECT_TRUE(ds.trials[0].ignored.empty());
  EXPECT_EQ(ds.trials[2].condition, Condition::Competing);
  EXPECT_EQ(ds.trials[2].ignored.size(), ds.trials[2].samples);
  const auto ffr = load_dataset(a, FeatureKind::EnvelopeModulations);
  EXPECT_EQ(ffr.trials[0].samples, 15u * 512u);
  EXPECT_EQ(ds.participants(), (std::vector<std::string>{"P01", "P02"}));
}

TEST_F(DataTest, SynthEegCarriesDelayedStimulus) {
  auto spec = small_spec();
  spec.kinds = {FeatureKind::Envelope};
  spec.snr_db = 0.0;
  spec.minutes_per_participant = 2.0;
  spec.trial_minutes = 2.0;
  spec.competing_minutes = 0.0;
  const auto m = synth_generate(spec, dir_ / "s");
  const auto ds = load_dataset(m, FeatureKind::Envelope);
  const auto p = synth_participant(spec, 0);
  const auto& t = ds.trials[0];
  // Project the EEG on the known topography and find the best lag.
  std::vector<double> proj(t.samples, 0.0);
  for (std::size_t c = 0; c < t.channels; ++c)
    for (std::size_t i = 0; i < t.samples; ++i) proj[i] += p.topography[c] * t.eeg[c * t.samples + i];
  std::vector<double> stim(t.stimulus.begin(), t.stimulus.end());
  double best = -1.0;
  std::size_t best_lag = 0;
  for (std::size_t lag = 0; lag < 32; ++lag) {
    double sxy = 0.0, sxx = 0.0, syy = 0.0, mx = 0.0, my = 0.0;
    const std::size_t n = t.samples - lag;
    for (std::size_t i = 0; i < n; ++i) {
      mx += stim[i];
      my += proj[i + lag];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      sxy += (stim[i] - mx) * (proj[i + lag] - my);
      sxx += (stim[i] - mx) * (stim[i] - mx);
      syy += (proj[i + lag] - my) * (proj[i + lag] - my);
    }
    const double r = sxy / std::sqrt(sxx * syy);
    if (r > best) {
      best = r;
      best_lag = lag;
    }
  }
  // Hann kernel of 0.1 s adds half its width to the delay.
  const double expected = (p.envelope_delay_s + 0.05) * 64.0;
  EXPECT_NEAR(static_cast<double>(best_lag), expected, 2.0);
  EXPECT_GT(best, 0.5);
  EXPECT_GE(p.envelope_delay_s, 0.1);
  EXPECT_LE(p.envelope_delay_s, 0.3);
}

TEST(SynthSpecCheck, RejectsInvalidSettings) {
  SynthSpec s;
  s.snr_db = std::numeric_limits<double>::infinity();
  EXPECT_THROW(s.validate(), Error);
  s = SynthSpec{};
  s.participants = 0;
  EXPECT_THROW(s.validate(), Error);
  s = SynthSpec{};
  s.raw = true;
  s.kinds = {FeatureKind::EnvelopeModulations};
  EXPECT_THROW(s.validate(), Error);
}

}  // namespace
}  // namespace mmdec::data
