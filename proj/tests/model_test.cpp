#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "mmdec/autodiff/grad_check.hpp"
#include "mmdec/common/binary_io.hpp"
#include "mmdec/common/error.hpp"
#include "mmdec/model/checkpoint.hpp"
#include "mmdec/model/decoder.hpp"

namespace mmdec::model {
namespace {

template <typename T>
Tensor<T> random_tensor(autodiff::Shape shape, std::mt19937_64& rng, double scale = 1.0) {
  Tensor<T> t(std::move(shape));
  std::normal_distribution<double> gauss(0.0, scale);
  for (auto& v : t.values()) v = static_cast<T>(gauss(rng));
  return t;
}

TEST(DecoderConfig, DefaultsAndReceptiveFields) {
  const auto env = DecoderConfig::for_kind(FeatureKind::Envelope);
  const auto ffr = DecoderConfig::for_kind(FeatureKind::EnvelopeModulations);
  EXPECT_EQ(env.rate, 64.0);
  EXPECT_EQ(ffr.rate, 512.0);
  EXPECT_EQ(env.segment_samples(), 192u);
  EXPECT_EQ(ffr.segment_samples(), 1536u);
  EXPECT_EQ(env.receptive_field(), 27u);
  EXPECT_EQ(std::lround(receptive_field(env).seconds * 1000.0), 422);
  EXPECT_EQ(std::lround(receptive_field(ffr).seconds * 1000.0), 53);
  EXPECT_EQ(parameter_count(env), 4544u);
}

TEST(DecoderConfig, RejectsUnusableSettings) {
  auto c = DecoderConfig::for_kind(FeatureKind::Envelope);
  c.rate = 512.0;
  EXPECT_THROW(c.validate(), Error);
  c = DecoderConfig::for_kind(FeatureKind::Envelope);
  c.segment_seconds = 0.4;  // 25.6 samples, below the receptive field
  EXPECT_THROW(c.validate(), Error);
  c = DecoderConfig::for_kind(FeatureKind::Envelope);
  c.dilations = {};
  EXPECT_THROW(c.validate(), Error);
}

TEST(InitGlorot, BoundsZeroBiasesAndDeterminism) {
  const auto config = DecoderConfig::for_kind(FeatureKind::Envelope);
  const auto p = init_glorot(config, 42);
  const auto layout = parameter_layout(config);
  ASSERT_EQ(p.arrays.size(), layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto& spec = layout[i];
    if (spec.is_bias) {
      for (const float v : p[i].values()) EXPECT_EQ(v, 0.0f) << spec.name;
      continue;
    }
    const double a = std::sqrt(6.0 / static_cast<double>(spec.fan_in + spec.fan_out));
    double max_abs = 0.0;
    for (const float v : p[i].values()) max_abs = std::max(max_abs, std::abs(static_cast<double>(v)));
    EXPECT_LE(max_abs, a * (1.0 + 1e-6)) << spec.name;
    if (p[i].size() >= 48) EXPECT_GT(max_abs, 0.8 * a) << spec.name;
  }
  const auto& dense = layout[ParamIndex::eeg_weight(1)];
  EXPECT_EQ(dense.fan_in, 48u);
  EXPECT_EQ(dense.fan_out, 48u);
  EXPECT_NEAR(std::sqrt(6.0 / 96.0), 0.25, 1e-12);
  EXPECT_EQ(init_glorot(config, 42), p);
  EXPECT_NE(init_glorot(config, 43), p);
}

struct Example {
  Tensor<float> eeg, a, b;
};

Example random_example(const DecoderConfig& c, std::mt19937_64& rng) {
  const auto t = c.segment_samples();
  return {random_tensor<float>({c.eeg_channels, t}, rng), random_tensor<float>({1, t}, rng),
          random_tensor<float>({1, t}, rng)};
}

TEST(Decoder, IdenticalCandidatesGiveExactlyOneHalf) {
  const auto c = DecoderConfig::for_kind(FeatureKind::Envelope);
  const auto p = init_glorot(c, 1);
  std::mt19937_64 rng(2);
  const auto ex = random_example(c, rng);
  const auto out = predict(p, ex.eeg, ex.a, ex.a);
  EXPECT_EQ(out.probability, 0.5);
  EXPECT_EQ(out.logit, 0.0);
}

TEST(Decoder, SwappingCandidatesMirrorsProbability) {
  const auto c = DecoderConfig::for_kind(FeatureKind::Envelope);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto p = init_glorot(c, static_cast<std::uint64_t>(i % 10));
    const auto ex = random_example(c, rng);
    const auto ab = predict(p, ex.eeg, ex.a, ex.b);
    const auto ba = predict(p, ex.eeg, ex.b, ex.a);
    ASSERT_NEAR(ba.probability, 1.0 - ab.probability, 1e-6) << i;
    ASSERT_EQ(ba.logit, -ab.logit) << i;
  }
}

TEST(Decoder, ProjectedLengthAndLocality) {
  const auto c = DecoderConfig::for_kind(FeatureKind::Envelope);
  const auto p = init_glorot(c, 5);
  std::mt19937_64 rng(6);
  const auto ex = random_example(c, rng);
  const auto project = [&](const Tensor<float>& eeg) {
    Tape<float> tape;
    const auto vars = param_leaves(tape, p, false);
    return eeg_module(c, vars, tape.leaf(eeg)).value();
  };
  const auto base = project(ex.eeg);
  ASSERT_EQ(base.shape(), (autodiff::Shape{16, 166}));
  const std::size_t t = 50;
  for (std::size_t s = 0; s < 192; ++s) {
    if (s >= t && s <= t + 26) continue;
    auto eeg = ex.eeg;
    for (std::size_t ch = 0; ch < 64; ++ch) eeg[ch * 192 + s] += 5.0f;
    const auto moved = project(eeg);
    for (std::size_t o = 0; o < 16; ++o) ASSERT_EQ(moved[o * 166 + t], base[o * 166 + t]) << s;
  }
}

TEST(Decoder, SimilaritiesAreScaleInvariantAtInitialisation) {
  const auto c = DecoderConfig::for_kind(FeatureKind::Envelope);
  const auto p = init_glorot(c, 7);
  std::mt19937_64 rng(8);
  const auto ex = random_example(c, rng);
  auto scaled = ex.eeg;
  for (auto& v : scaled.values()) v *= 37.0f;
  const auto o1 = predict(p, ex.eeg, ex.a, ex.b);
  const auto o2 = predict(p, scaled, ex.a, ex.b);
  for (std::size_t i = 0; i < o1.similarity_a.size(); ++i) {
    EXPECT_NEAR(o1.similarity_a[i], o2.similarity_a[i], 1e-6);
    EXPECT_NEAR(o1.similarity_b[i], o2.similarity_b[i], 1e-6);
  }
}

TEST(Decoder, ShapeMismatchesAreRejected) {
  const auto c = DecoderConfig::for_kind(FeatureKind::Envelope);
  const auto p = init_glorot(c, 9);
  EXPECT_THROW(predict(p, Tensor<float>({63, 192}), Tensor<float>({1, 192}), Tensor<float>({1, 192})), Error);
  EXPECT_THROW(predict(p, Tensor<float>({64, 192}), Tensor<float>({1, 191}), Tensor<float>({1, 192})), Error);
  EXPECT_THROW(predict(p, Tensor<float>({64, 20}), Tensor<float>({1, 20}), Tensor<float>({1, 20})), Error);
  auto bad = p;
  bad.arrays.pop_back();
  EXPECT_THROW(check_params(bad), Error);
}

TEST(Decoder, FullLossGradientMatchesFiniteDifferences) {
  DecoderConfig c = DecoderConfig::for_kind(FeatureKind::Envelope);
  c.eeg_channels = 5;
  c.hidden_channels = 3;
  c.segment_seconds = 40.0 / 64.0;
  const auto init = init_glorot<double>(c, 11);
  std::mt19937_64 rng(12);
  std::vector<Tensor<double>> params = init.arrays;
  // Non-zero biases exercise every gradient path.
  for (auto& a : params) {
    if (a.rank() == 1 && a.size() == c.hidden_channels) a = random_tensor<double>(a.shape(), rng, 0.1);
  }
  struct Item {
    Tensor<double> eeg, a, b;
    double label;
  };
  std::vector<Item> batch;
  for (int i = 0; i < 4; ++i) {
    batch.push_back({random_tensor<double>({5, 40}, rng), random_tensor<double>({1, 40}, rng),
                     random_tensor<double>({1, 40}, rng), static_cast<double>(i % 2)});
  }
  const auto fn = [&](const std::vector<Tensor<double>>& p, bool need) {
    autodiff::LossAndGrad total{0.0, {}};
    for (const auto& t : p) total.grads.emplace_back(t.size(), 0.0);
    for (const auto& item : batch) {
      Tape<double> tape;
      std::vector<Var<double>> vars;
      for (const auto& t : p) vars.push_back(tape.leaf(t, need));
      const auto out = forward(c, vars, tape.leaf(item.eeg), tape.leaf(item.a), tape.leaf(item.b));
      const auto loss = autodiff::bce_loss(out.probability, item.label);
      total.loss += loss.value()[0] / static_cast<double>(batch.size());
      if (need) {
        tape.backward(loss);
        for (std::size_t k = 0; k < vars.size(); ++k)
          for (std::size_t j = 0; j < p[k].size(); ++j)
            total.grads[k][j] += tape.grad(vars[k])[j] / static_cast<double>(batch.size());
      }
    }
    return total;
  };
  const auto r = autodiff::grad_check(fn, params, 1e-6);
  EXPECT_LT(r.max_relative_error, 1e-4) << r.worst_param << ":" << r.worst_index << " " << r.worst_analytic
                                        << " vs " << r.worst_numeric;
  EXPECT_EQ(r.checked, parameter_count(c));
}

class CheckpointTest : public ::testing::Test {
 protected:
  std::filesystem::path dir_ = std::filesystem::temp_directory_path() / "mmdec_checkpoint_test";
  void SetUp() override { std::filesystem::create_directories(dir_); }
  void TearDown() override { std::filesystem::remove_all(dir_); }
};

TEST_F(CheckpointTest, RoundTripIsByteIdentical) {
  for (const auto kind : {FeatureKind::Envelope, FeatureKind::EnvelopeModulations}) {
    const auto p = init_glorot(DecoderConfig::for_kind(kind), 3);
    const auto path = dir_ / "a.ckpt";
    save_checkpoint(p, path);
    const auto loaded = load_checkpoint(path);
    EXPECT_EQ(loaded, p);
    EXPECT_EQ(encode_checkpoint(loaded), read_file(path));
  }
}

TEST_F(CheckpointTest, FileSizeMatchesLayout) {
  const auto c = DecoderConfig::for_kind(FeatureKind::Envelope);
  const auto path = dir_ / "b.ckpt";
  save_checkpoint(init_glorot(c, 4), path);
  std::size_t expected = 4 + 4 * 6 + 4 * c.layers() + 8 + 8 + 4;
  for (const auto& spec : parameter_layout(c)) expected += 4 + spec.name.size() + 4 + 4 * spec.shape.size();
  expected += 4 * parameter_count(c);
  EXPECT_EQ(std::filesystem::file_size(path), expected);
}

TEST_F(CheckpointTest, CorruptionIsDetected) {
  const auto bytes = encode_checkpoint(init_glorot(DecoderConfig::for_kind(FeatureKind::Envelope), 5));
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad_magic), DataError);
  EXPECT_THROW(decode_checkpoint(bytes.substr(0, bytes.size() - 1)), DataError);
  EXPECT_THROW(decode_checkpoint(bytes + "x"), DataError);
  EXPECT_THROW(load_checkpoint(dir_ / "missing.ckpt"), DataError);
}

}  // namespace
}  // namespace mmdec::model
