#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "mmdec/common/error.hpp"
#include "mmdec/eeg/layout.hpp"
#include "mmdec/eeg/preprocess.hpp"
#include "test_util.hpp"

namespace mmdec::eeg {
namespace {

EegRecording make_recording(const ChannelLayout& layout, std::size_t samples, double rate) {
  EegRecording r;
  r.data = SignalMatrix::Zero(static_cast<Eigen::Index>(layout.size()), static_cast<Eigen::Index>(samples));
  r.rate = rate;
  r.layout = layout;
  r.participant_id = "p0";
  r.trial_id = "t0";
  return r;
}

EegRecording noise_recording(const ChannelLayout& layout, std::size_t samples, double rate, double sigma,
                             std::uint64_t seed) {
  EegRecording r = make_recording(layout, samples, rate);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (Eigen::Index c = 0; c < r.data.rows(); ++c)
    for (Eigen::Index t = 0; t < r.data.cols(); ++t) r.data(c, t) = gauss(rng);
  return r;
}

ChannelLayout first_channels(const ChannelLayout& layout, std::size_t n) {
  std::vector<std::string> names(layout.names().begin(), layout.names().begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<Position> pos(layout.positions().begin(), layout.positions().begin() + static_cast<std::ptrdiff_t>(n));
  return {names, pos};
}

TEST(ChannelLayout, BuiltinLayoutsHaveExpectedChannels) {
  const auto b = ChannelLayout::biosemi64();
  const auto i = ChannelLayout::icl63();
  EXPECT_EQ(b.size(), 64u);
  EXPECT_EQ(i.size(), 63u);
  for (const char* name : {"Fpz", "Iz", "P9", "P10", "PO4"}) {
    EXPECT_TRUE(b.contains(name)) << name;
    EXPECT_FALSE(i.contains(name)) << name;
  }
  for (const char* name : {"FT9", "FT10", "TP9", "TP10"}) {
    EXPECT_FALSE(b.contains(name)) << name;
    EXPECT_TRUE(i.contains(name)) << name;
  }
  for (const auto& p : b.positions()) EXPECT_NEAR(norm(p), 1.0, 1e-6);
  for (const auto& p : i.positions()) EXPECT_NEAR(norm(p), 1.0, 1e-6);
}

TEST(ChannelLayout, RejectsDuplicatesAndNonUnitPositions) {
  EXPECT_THROW(ChannelLayout({"A", "A"}, {{1, 0, 0}, {0, 1, 0}}), Error);
  EXPECT_THROW(ChannelLayout({"A", "B"}, {{1, 0, 0}, {0, 2, 0}}), Error);
  EXPECT_THROW(ChannelLayout({"A"}, {{1, 0, 0}, {0, 1, 0}}), Error);
}

TEST(ChannelLayout, FileRoundTripAndResolve) {
  const auto path = std::filesystem::temp_directory_path() / "mmdec_layout_roundtrip.txt";
  ChannelLayout::biosemi64().write(path);
  const auto back = ChannelLayout::read(path);
  ASSERT_EQ(back.size(), 64u);
  for (std::size_t k = 0; k < back.size(); ++k) {
    EXPECT_EQ(back.name(k), ChannelLayout::biosemi64().name(k));
    EXPECT_NEAR(angular_distance(back.position(k), ChannelLayout::biosemi64().position(k)), 0.0, 1e-6);
  }
  EXPECT_EQ(ChannelLayout::resolve("icl63"), ChannelLayout::icl63());
  EXPECT_EQ(ChannelLayout::resolve(path.string()).size(), 64u);
  std::filesystem::remove(path);
  EXPECT_THROW(ChannelLayout::resolve("/nonexistent/layout.txt"), std::exception);
}

TEST(EegRecording, InconsistentLayoutIsRejected) {
  EegRecording r = make_recording(ChannelLayout::biosemi64(), 10, 64.0);
  r.data.resize(3, 10);
  EXPECT_THROW(r.check_consistent(), Error);
}

TEST(HighpassDetrend, RemovesOffsetAndRejectsEmpty) {
  EegRecording r = make_recording(first_channels(ChannelLayout::biosemi64(), 2), 64 * 60, 64.0);
  r.data.setConstant(40e-6);
  const auto y = highpass_detrend(r);
  EXPECT_LT(y.data.cwiseAbs().mean(), 1e-3 * 40e-6);
  EXPECT_THROW(highpass_detrend(make_recording(ChannelLayout::biosemi64(), 0, 64.0)), Error);
  EXPECT_THROW(highpass_detrend(make_recording(ChannelLayout::biosemi64(), 100, 32.0)), Error);
}

TEST(ThresholdInterpolate, CleanRecordingIsUnchanged) {
  const auto r = noise_recording(first_channels(ChannelLayout::biosemi64(), 4), 500, 1024.0, 20e-6, 1);
  const auto out = threshold_interpolate(r);
  EXPECT_EQ(out.recording.data, r.data);
  EXPECT_FALSE(out.mask.flags.any());
}

TEST(ThresholdInterpolate, SingleSpikeBecomesNeighbourMidpoint) {
  auto r = make_recording(first_channels(ChannelLayout::biosemi64(), 1), 5, 1024.0);
  r.data << 1e-6, 10e-6, 600e-6, 30e-6, 2e-6;
  const auto out = threshold_interpolate(r);
  EXPECT_DOUBLE_EQ(out.recording.data(0, 2), 20e-6);
  EXPECT_TRUE(out.mask.flags(0, 2));
  EXPECT_EQ(out.mask.flags.count(), 1);
}

TEST(ThresholdInterpolate, GlitchRunFollowsStraightLine) {
  auto r = make_recording(first_channels(ChannelLayout::biosemi64(), 1), 6, 1024.0);
  r.data << 0.0, 100e-6, -700e-6, 900e-6, 600e-6, 300e-6;
  const auto out = threshold_interpolate(r);
  EXPECT_NEAR(out.recording.data(0, 2), 150e-6, 1e-18);
  EXPECT_NEAR(out.recording.data(0, 3), 200e-6, 1e-18);
  EXPECT_NEAR(out.recording.data(0, 4), 250e-6, 1e-18);
  EXPECT_EQ(out.mask.flags.count(), 3);
}

TEST(ThresholdInterpolate, BoundaryRunsHoldNearestCleanValue) {
  auto r = make_recording(first_channels(ChannelLayout::biosemi64(), 1), 6, 1024.0);
  r.data << 800e-6, 900e-6, 5e-6, 7e-6, 1e-3, -1e-3;
  const auto out = threshold_interpolate(r);
  EXPECT_EQ(out.recording.data(0, 0), 5e-6);
  EXPECT_EQ(out.recording.data(0, 1), 5e-6);
  EXPECT_EQ(out.recording.data(0, 4), 7e-6);
  EXPECT_EQ(out.recording.data(0, 5), 7e-6);
}

TEST(ThresholdInterpolate, IsIdempotent) {
  auto r = noise_recording(first_channels(ChannelLayout::biosemi64(), 3), 2000, 1024.0, 300e-6, 4);
  const auto once = threshold_interpolate(r).recording;
  const auto twice = threshold_interpolate(once);
  EXPECT_EQ(twice.recording.data, once.data);
  EXPECT_FALSE(twice.mask.flags.any());
}

TEST(ThresholdInterpolate, RejectsNonPositiveThreshold) {
  const auto r = make_recording(first_channels(ChannelLayout::biosemi64(), 1), 4, 1024.0);
  EXPECT_THROW(threshold_interpolate(r, 0.0), Error);
}

TEST(FrontalPowerMask, StationaryNoiseFlagsChiSquareTail) {
  const auto r = noise_recording(ChannelLayout::biosemi64(), 200000, 1024.0, 1.0, 8);
  const auto mask = frontal_power_mask(r);
  const double fraction = static_cast<double>(mask.flagged_samples()) / 200000.0;
  // P(chi2_1 > 5) = 0.025347318677468325
  EXPECT_NEAR(fraction, 0.0253473, 0.003);
}

TEST(FrontalPowerMask, BurstIsFlaggedAndQuietIsNot) {
  auto r = noise_recording(ChannelLayout::biosemi64(), 10000, 1024.0, 1e-6, 2);
  for (const char* name : {"Fp1", "Fp2", "AF3", "AF4", "Fz"}) {
    const auto c = static_cast<Eigen::Index>(*r.layout.index_of(name));
    for (Eigen::Index t = 5000; t < 5100; ++t) r.data(c, t) = 1e-3;
  }
  const auto mask = frontal_power_mask(r);
  for (std::size_t t = 0; t < 10000; ++t) {
    const bool in_burst = t >= 5000 && t < 5100;
    if (in_burst) EXPECT_TRUE(mask.global_flags[t]) << t;
    else EXPECT_FALSE(mask.global_flags[t]) << t;
  }
}

TEST(FrontalPowerMask, ZeroRecordingFlagsNothing) {
  const auto r = make_recording(ChannelLayout::biosemi64(), 1000, 1024.0);
  EXPECT_EQ(frontal_power_mask(r).flagged_samples(), 0u);
}

TEST(FrontalPowerMask, MissingChannelsAreNamed) {
  const auto r = make_recording(first_channels(ChannelLayout::biosemi64(), 2), 100, 1024.0);
  try {
    frontal_power_mask(r);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("AF3"), std::string::npos);
  }
}

TEST(MwfSuppress, AllFalseMaskReturnsInput) {
  const auto r = noise_recording(first_channels(ChannelLayout::biosemi64(), 8), 1000, 1024.0, 1.0, 3);
  const auto out = mwf_suppress(r, ArtifactMask::empty(8, 1000));
  EXPECT_EQ(out.data, r.data);
}

TEST(MwfSuppress, TooFewFlaggedSamplesReturnsInput) {
  const auto r = noise_recording(first_channels(ChannelLayout::biosemi64(), 8), 1000, 1024.0, 1.0, 3);
  auto mask = ArtifactMask::empty(8, 1000);
  for (std::size_t t = 0; t < 15; ++t) mask.global_flags[t] = true;
  EXPECT_EQ(mwf_suppress(r, mask).data, r.data);
}

TEST(MwfSuppress, IdenticalCovariancesGiveIdentityFilter) {
  const std::size_t n = 4000;
  auto r = noise_recording(first_channels(ChannelLayout::biosemi64(), 6), n, 1024.0, 1.0, 5);
  // Flagged half is the clean half reversed: identical second moments.
  for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(n / 2); ++t) r.data.col(static_cast<Eigen::Index>(n) - 1 - t) = r.data.col(t);
  auto mask = ArtifactMask::empty(6, n);
  for (std::size_t t = n / 2; t < n; ++t) mask.global_flags[t] = true;
  const auto out = mwf_suppress(r, mask);
  EXPECT_LT((out.data - r.data).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(MwfSuppress, RankOneArtifactIsSuppressed) {
  const std::size_t channels = 64, n = 20000;
  auto r = noise_recording(first_channels(ChannelLayout::biosemi64(), channels), n, 1024.0, 1.0, 6);
  const SignalMatrix clean = r.data;
  Eigen::VectorXd direction(channels);
  for (std::size_t c = 0; c < channels; ++c) direction[static_cast<Eigen::Index>(c)] = std::sin(0.7 * static_cast<double>(c) + 0.3);
  direction.normalize();
  std::mt19937_64 rng(10);
  std::normal_distribution<double> gauss(0.0, 20.0);
  auto mask = ArtifactMask::empty(channels, n);
  for (std::size_t t = 12000; t < 16000; ++t) {
    mask.global_flags[t] = true;
    r.data.col(static_cast<Eigen::Index>(t)) += direction * gauss(rng);
  }
  const auto out = mwf_suppress(r, mask);

  double before = 0.0, after = 0.0;
  for (std::size_t t = 12000; t < 16000; ++t) {
    const auto col = static_cast<Eigen::Index>(t);
    before += std::pow(direction.dot(r.data.col(col)), 2);
    after += std::pow(direction.dot(out.data.col(col)), 2);
  }
  EXPECT_LT(10.0 * std::log10(after / before), -10.0);

  double clean_var_in = 0.0, clean_var_out = 0.0;
  for (std::size_t c = 0; c < channels; ++c) {
    std::vector<double> a, b;
    for (std::size_t t = 0; t < 12000; ++t) {
      a.push_back(clean(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t)));
      b.push_back(out.data(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t)));
      clean_var_in += a.back() * a.back();
      clean_var_out += b.back() * b.back();
    }
    EXPECT_GT(test::correlation(a, b), 0.95) << c;
  }
  EXPECT_LE(clean_var_out, 1.01 * clean_var_in);
}

TEST(CommonAverageReference, ChannelSumsVanish) {
  const auto r = noise_recording(ChannelLayout::biosemi64(), 500, 64.0, 1e-5, 12);
  const auto y = common_average_reference(r);
  for (Eigen::Index t = 0; t < y.data.cols(); ++t) EXPECT_NEAR(y.data.col(t).sum(), 0.0, 1e-9 * 64 * 1e-5);
}

TEST(CommonAverageReference, TwoChannelsAndIdenticalChannels) {
  auto r = make_recording(first_channels(ChannelLayout::biosemi64(), 2), 2, 64.0);
  r.data << 3.0, 1.0, -1.0, 5.0;
  const auto y = common_average_reference(r);
  EXPECT_DOUBLE_EQ(y.data(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(y.data(1, 0), -2.0);
  EXPECT_DOUBLE_EQ(y.data(0, 1), -2.0);
  EXPECT_DOUBLE_EQ(y.data(1, 1), 2.0);

  auto same = make_recording(first_channels(ChannelLayout::biosemi64(), 4), 3, 64.0);
  same.data.setConstant(7.0);
  EXPECT_EQ(common_average_reference(same).data.cwiseAbs().maxCoeff(), 0.0);
}

TEST(MapLayout, SameLayoutIsIdentity) {
  const auto r = noise_recording(ChannelLayout::biosemi64(), 100, 64.0, 1.0, 1);
  EXPECT_EQ(map_layout(r, ChannelLayout::biosemi64()).data, r.data);
}

TEST(MapLayout, ConstantFieldStaysConstant) {
  auto r = make_recording(ChannelLayout::icl63(), 10, 64.0);
  r.data.setConstant(3e-6);
  const auto y = map_layout(r, ChannelLayout::biosemi64());
  EXPECT_EQ(y.layout, ChannelLayout::biosemi64());
  for (const char* name : {"Fpz", "Iz", "P9", "P10", "PO4"}) {
    const auto c = static_cast<Eigen::Index>(*y.layout.index_of(name));
    for (Eigen::Index t = 0; t < 10; ++t) EXPECT_NEAR(y.data(c, t), 3e-6, 1e-18);
  }
}

TEST(MapLayout, DipolarFieldIsInterpolatedAtFpz) {
  // Potential of a forward-pointing current dipole 0.3 above the head centre.
  const Position r0{0.0, 0.0, 0.3};
  const Position m{0.0, 1.0, 0.0};
  const auto field = [&](const Position& p) {
    const Position d{p.x - r0.x, p.y - r0.y, p.z - r0.z};
    return dot(m, d) / std::pow(norm(d), 3);
  };
  const auto source = ChannelLayout::icl63();
  auto r = make_recording(source, 1, 64.0);
  for (std::size_t c = 0; c < source.size(); ++c) r.data(static_cast<Eigen::Index>(c), 0) = field(source.position(c));
  const auto target = ChannelLayout::biosemi64();
  const auto y = map_layout(r, target);
  const auto fpz = *target.index_of("Fpz");
  const double expected = field(target.position(fpz));
  EXPECT_NEAR(y.data(static_cast<Eigen::Index>(fpz), 0), expected, 0.15 * std::abs(expected));
}

TEST(MapLayout, MappingBackToSupersetKeepsPresentChannelsBitIdentical) {
  const auto r = noise_recording(ChannelLayout::icl63(), 50, 64.0, 1.0, 3);
  const auto there = map_layout(r, ChannelLayout::biosemi64());
  const auto back = map_layout(there, ChannelLayout::icl63());
  for (std::size_t c = 0; c < r.layout.size(); ++c) {
    const auto& name = r.layout.name(c);
    if (!ChannelLayout::biosemi64().contains(name)) continue;
    EXPECT_EQ(back.data.row(static_cast<Eigen::Index>(c)), r.data.row(static_cast<Eigen::Index>(c))) << name;
  }
}

TEST(MapLayout, TargetWithoutNeighboursIsRejected) {
  auto r = make_recording(ChannelLayout({"A", "B"}, {{0, 0, 1}, {0.0, 0.6, 0.8}}), 4, 64.0);
  const ChannelLayout target({"A", "Far"}, {{0, 0, 1}, {0, 0, -1}});
  EXPECT_THROW(map_layout(r, target), Error);
}

TEST(Pipelines, ZeroInputGivesZeroOutputAtTargetRates) {
  const auto r = make_recording(ChannelLayout::biosemi64(), 1024 * 4, 1024.0);
  const auto env = preprocess_envelope_pipeline(r);
  EXPECT_EQ(env.rate, 64.0);
  EXPECT_EQ(env.samples(), 256u);
  EXPECT_EQ(env.data.cwiseAbs().maxCoeff(), 0.0);
  const auto ffr = preprocess_ffr_pipeline(r);
  EXPECT_EQ(ffr.rate, 512.0);
  EXPECT_EQ(ffr.samples(), 2048u);
  EXPECT_EQ(ffr.data.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Pipelines, TenMinuteTrialLengthAtSixtyFourHertz) {
  const auto r = noise_recording(ChannelLayout::biosemi64(), 1024 * 600, 1024.0, 10e-6, 21);
  const auto env = preprocess_envelope_pipeline(r);
  EXPECT_NEAR(static_cast<double>(env.samples()), 38400.0, 1.0);
  EXPECT_TRUE(env.data.allFinite());
  for (Eigen::Index t = 0; t < env.data.cols(); t += 997) EXPECT_NEAR(env.data.col(t).sum(), 0.0, 1e-9 * 64 * 1e-5);
}

TEST(Pipelines, IclLayoutIsMappedBeforeReferencing) {
  const auto r = noise_recording(ChannelLayout::icl63(), 1000 * 3, 1000.0, 10e-6, 22);
  PipelineOptions options;
  options.frontal_channels = {"Fp1", "Fp2", "AF3", "AF4", "Fz"};
  options.target_layout = ChannelLayout::biosemi64();
  const auto ffr = preprocess_ffr_pipeline(r, options);
  EXPECT_EQ(ffr.layout, ChannelLayout::biosemi64());
  EXPECT_EQ(ffr.samples(), 1536u);
  const auto env = preprocess_envelope_pipeline(r, options);
  EXPECT_EQ(env.layout, ChannelLayout::biosemi64());
  EXPECT_EQ(env.samples(), 192u);
}

}  // namespace
}  // namespace mmdec::eeg
