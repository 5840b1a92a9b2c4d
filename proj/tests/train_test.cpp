#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include "mmdec/common/binary_io.hpp"
#include "mmdec/data/synth.hpp"
#include "mmdec/model/checkpoint.hpp"
#include "mmdec/train/adam.hpp"
#include "mmdec/train/examples.hpp"
#include "mmdec/train/trainer.hpp"

namespace mmdec::train {
namespace {

using signal::FeatureKind;

TEST(EnumerateExamples, SixtySecondTrialGivesFiftyFourExamples) {
  const auto ex = enumerate_examples(0, 0.0, 60.0, {});
  ASSERT_EQ(ex.size(), 54u);
  for (std::size_t k = 0; k < ex.size(); ++k) {
    EXPECT_DOUBLE_EQ(ex[k].onset_s, static_cast<double>(k));
    EXPECT_DOUBLE_EQ(ex[k].mismatch_onset_s, static_cast<double>(k) + 4.0);
    EXPECT_DOUBLE_EQ(ex[k].length_s, 3.0);
    EXPECT_LE(ex[k].mismatch_onset_s + ex[k].length_s, 60.0);
  }
  EXPECT_DOUBLE_EQ(ex.back().onset_s, 53.0);
}

TEST(EnumerateExamples, BoundaryAndShortTrials) {
  EXPECT_EQ(enumerate_examples(0, 0.0, 7.0, {}).size(), 1u);
  EXPECT_TRUE(enumerate_examples(0, 0.0, 6.9, {}).empty());
  const auto shifted = enumerate_examples(3, 48.0, 54.0 + 7.0, {});
  ASSERT_EQ(shifted.size(), 7u);
  EXPECT_EQ(shifted.front().trial, 3u);
  EXPECT_DOUBLE_EQ(shifted.front().onset_s, 48.0);
}

TEST(EnumerateExamples, EveryLaterMatchedSegmentIsAlsoAMismatch) {
  const auto ex = enumerate_examples(0, 0.0, 60.0, {});
  std::set<double> mismatched;
  for (const auto& e : ex) mismatched.insert(e.mismatch_onset_s);
  for (std::size_t k = 1; k < ex.size(); ++k) EXPECT_GT(ex[k].onset_s, ex[k - 1].onset_s);
  for (const auto& e : ex) {
    if (e.onset_s >= 4.0) EXPECT_TRUE(mismatched.count(e.onset_s)) << e.onset_s;
  }
}

TEST(EnumerateExamples, AttentionPairsAreTimeAligned) {
  const auto ex = enumerate_attention_examples(1, 0.0, 12.0, {});
  ASSERT_EQ(ex.size(), 10u);
  for (const auto& e : ex) {
    EXPECT_TRUE(e.use_ignored);
    EXPECT_EQ(e.onset_s, e.mismatch_onset_s);
  }
}

TEST(MakeBatches, BalancedLabelsAndTrialContiguity) {
  std::vector<std::vector<ExampleRef>> by_trial;
  for (std::size_t t = 0; t < 7; ++t) by_trial.push_back(enumerate_examples(t, 0.0, 60.0, {}));
  Rng rng(4);
  std::vector<ExampleRef> flat;
  const auto batches = make_batches(by_trial, 128, rng, flat);
  ASSERT_EQ(flat.size(), 7u * 54u);
  EXPECT_EQ(batches.size(), flat.size() / 128);
  for (const auto& b : batches) {
    ASSERT_EQ(b.labels.size(), 128u);
    EXPECT_EQ(std::count(b.labels.begin(), b.labels.end(), 1), 64);
    EXPECT_EQ(std::count(b.labels.begin(), b.labels.end(), 0), 64);
  }
  for (std::size_t i = 1; i < flat.size(); ++i) {
    if (flat[i].trial == flat[i - 1].trial) EXPECT_GT(flat[i].onset_s, flat[i - 1].onset_s);
  }
  std::vector<std::size_t> order;
  for (const auto& e : flat)
    if (order.empty() || order.back() != e.trial) order.push_back(e.trial);
  EXPECT_EQ(order.size(), 7u);
  Rng other(5);
  std::vector<ExampleRef> flat2;
  make_batches(by_trial, 128, other, flat2);
  EXPECT_NE(flat, flat2);
  EXPECT_THROW(make_batches(by_trial, 127, rng, flat), Error);
}

using Scalar = std::vector<autodiff::Tensor<double>>;

TEST(Adam, FirstStepMovesByLearningRate) {
  Scalar p{autodiff::Tensor<double>({1}, {0.0})};
  auto state = adam_init(p);
  ASSERT_TRUE(adam_step(p, {{1.0}}, state, 1e-3));
  // -lr / (1 + eps), evaluated in 40-digit arithmetic.
  EXPECT_NEAR(p[0][0], -0.00099999999000000001, 1e-18);
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  Scalar p{autodiff::Tensor<double>({3}, {1.0, -2.0, 0.5})};
  const auto before = p;
  auto state = adam_init(p);
  adam_step(p, {{0.0, 0.0, 0.0}}, state, 1e-3);
  EXPECT_EQ(p, before);
}

TEST(Adam, QuadraticConvergesToMinimum) {
  Scalar p{autodiff::Tensor<double>({1}, {0.0})};
  auto state = adam_init(p);
  for (int i = 0; i < 200; ++i) adam_step(p, {{2.0 * (p[0][0] - 3.0)}}, state, 0.1);
  EXPECT_LT(std::abs(p[0][0] - 3.0), 0.5);
  // Same recursion in 40-digit arithmetic.
  EXPECT_NEAR(p[0][0], 3.0000530297387057, 1e-10);
}

TEST(Adam, NonFiniteGradientSkipsUpdate) {
  Scalar p{autodiff::Tensor<double>({2}, {1.0, 2.0})};
  const auto before = p;
  auto state = adam_init(p);
  EXPECT_FALSE(adam_step(p, {{0.5, std::numeric_limits<double>::quiet_NaN()}}, state, 1e-3));
  EXPECT_EQ(p, before);
  EXPECT_EQ(state.skipped, 1u);
  EXPECT_EQ(state.step, 0u);
  EXPECT_THROW(adam_step(p, {{0.5}}, state, 1e-3), Error);
}

TEST(LearningRate, DividesByTenEverySevenEpochs) {
  EXPECT_DOUBLE_EQ(lr_schedule(0, 1e-3, 7, 10.0), 1e-3);
  EXPECT_DOUBLE_EQ(lr_schedule(6, 1e-3, 7, 10.0), 1e-3);
  EXPECT_DOUBLE_EQ(lr_schedule(7, 1e-3, 7, 10.0), 1e-4);
  EXPECT_DOUBLE_EQ(lr_schedule(20, 1e-3, 7, 10.0), 1e-5);
}

TEST(EarlyStopping, ListedLossesRunToTheSeventhEpoch) {
  // 0.61 does not beat the 0.6 of epoch 2, so the seventh epoch is the fifth
  // without improvement and exhausts the patience.
  EarlyStopper s(5);
  const std::vector<double> losses{0.7, 0.6, 0.65, 0.64, 0.66, 0.63, 0.61};
  for (std::size_t i = 0; i < losses.size(); ++i) {
    EXPECT_FALSE(s.should_stop()) << i;
    s.update(losses[i]);
    EXPECT_LE(s.epochs_since_improvement(), 5u);
  }
  EXPECT_TRUE(s.should_stop());
  EXPECT_EQ(s.epochs(), 7u);
  EXPECT_EQ(s.best_epoch(), 2u);
  EXPECT_DOUBLE_EQ(s.best_loss(), 0.6);
}

TEST(EarlyStopping, IncreasingLossesStopAfterSixthEpoch) {
  EarlyStopper s(5);
  std::size_t epoch = 0;
  for (const double l : {0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2}) {
    ++epoch;
    s.update(l);
    if (s.should_stop()) break;
  }
  EXPECT_EQ(epoch, 6u);
  EXPECT_EQ(s.best_epoch(), 1u);
}

class TrainerTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = std::filesystem::temp_directory_path() / "mmdec_train_test";
    std::filesystem::remove_all(dir_);
    data::SynthSpec spec;
    spec.participants = 4;
    spec.minutes_per_participant = 2.0;
    spec.trial_minutes = 2.0;
    spec.competing_minutes = 0.0;
    spec.snr_db = -12.0;
    spec.seed = 3;
    ds_ = new Dataset(data::load_dataset(data::synth_generate(spec, dir_), FeatureKind::Envelope));
  }
  static void TearDownTestSuite() {
    delete ds_;
    std::filesystem::remove_all(dir_);
  }

  static TrainSettings settings() {
    TrainSettings s;
    s.batch_size = 32;
    s.max_epochs = 2;
    s.seed = 9;
    return s;
  }
  static model::DecoderConfig config() { return model::DecoderConfig::for_kind(FeatureKind::Envelope); }

  static inline std::filesystem::path dir_;
  static inline Dataset* ds_ = nullptr;
};

TEST_F(TrainerTest, SameSeedGivesIdenticalHistoryAndParameters) {
  const auto a = fit_population(*ds_, config(), settings());
  const auto b = fit_population(*ds_, config(), settings());
  ASSERT_EQ(a.history.size(), 2u);
  EXPECT_EQ(a.params, b.params);
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].train_loss, b.history[i].train_loss);
    EXPECT_EQ(a.history[i].val_loss, b.history[i].val_loss);
  }
  auto other = settings();
  other.seed = 10;
  EXPECT_NE(fit_population(*ds_, config(), other).params, a.params);
}

TEST_F(TrainerTest, ZeroLearningRateLeavesParametersBitIdentical) {
  auto s = settings();
  s.learning_rate = 0.0;
  s.max_epochs = 1;
  const auto init = model::init_glorot(config(), s.seed);
  const auto r = fit_population(*ds_, config(), s);
  EXPECT_EQ(r.params, init);
  EXPECT_EQ(model::encode_checkpoint(r.params), model::encode_checkpoint(init));
}

TEST_F(TrainerTest, ZeroEpochsReturnsInputAndFineTuneIsPure) {
  auto s = settings();
  s.max_epochs = 0;
  const auto init = model::init_glorot(config(), 1);
  EXPECT_EQ(fine_tune(init, *ds_, "P01", s).params, init);
  s.max_epochs = 1;
  s.batch_size = 8;
  const auto copy = init;
  const auto tuned = fine_tune(init, *ds_, "P01", s);
  EXPECT_EQ(init, copy);
  EXPECT_NE(tuned.params, init);
  EXPECT_THROW(fine_tune(init, *ds_, "nobody", s), Error);
}

TEST_F(TrainerTest, ThreadCountDoesNotChangeGradients) {
  const auto p = model::init_glorot(config(), 2);
  const auto ex = examples_by_trial(*ds_, Portion::Train, {});
  std::vector<ExampleRef> refs(ex[0].begin(), ex[0].begin() + 12);
  const auto labels = alternating_labels(refs.size());
  std::vector<std::vector<double>> g1, g3;
  const double l1 = batch_gradient(p, *ds_, refs, labels, g1, 1);
  const double l3 = batch_gradient(p, *ds_, refs, labels, g3, 3);
  EXPECT_EQ(l1, l3);
  EXPECT_EQ(g1, g3);
}

TEST_F(TrainerTest, RunDirectoryHoldsConfigMetricsAndCheckpoint) {
  data::RunConfig rc;
  rc.batch_size = 32;
  rc.max_epochs = 2;
  const auto run_dir = dir_ / "run";
  const auto r = train_run_directory(run_dir, rc, [&](const EpochCallback& cb) {
    return fit_population(*ds_, config(), TrainSettings::from(rc), cb);
  });
  EXPECT_EQ(data::RunConfig::load(run_dir / "config.txt"), rc);
  EXPECT_EQ(model::load_checkpoint(run_dir / "best.ckpt"), r.params);
  const auto metrics = read_file(run_dir / "metrics.tsv");
  EXPECT_EQ(std::count(metrics.begin(), metrics.end(), '\n'), 3);
  EXPECT_EQ(metrics.rfind("epoch\ttrain_loss\tval_loss\tlr\n", 0), 0u);
}

TEST_F(TrainerTest, MemorisesTwoHundredExamples) {
  auto all = examples_by_trial(*ds_, Portion::Train, {});
  std::vector<ExampleRef> subset;
  for (const auto& t : all) subset.insert(subset.end(), t.begin(), t.end());
  ASSERT_GE(subset.size(), 160u);
  subset.resize(std::min<std::size_t>(200, subset.size()));
  const auto labels = alternating_labels(subset.size());
  auto p = model::init_glorot(config(), 4);
  auto state = adam_init(p.arrays);
  std::vector<std::vector<double>> grads;
  double loss = 1.0;
  std::size_t epoch = 0;
  for (; epoch < 200 && loss >= 0.1; ++epoch) {
    for (std::size_t start = 0; start < subset.size(); start += 40) {
      const std::size_t end = std::min(subset.size(), start + 40);
      const std::vector<ExampleRef> refs(subset.begin() + start, subset.begin() + end);
      const std::vector<int> lab(labels.begin() + start, labels.begin() + end);
      batch_gradient(p, *ds_, refs, lab, grads);
      adam_step(p.arrays, grads, state, 1e-3);
    }
    loss = mean_loss(p, *ds_, subset, labels);
  }
  EXPECT_LT(loss, 0.1) << "after " << epoch << " epochs";
}

}  // namespace
}  // namespace mmdec::train
