#include "chordlab/learner.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"

namespace chordlab {
namespace {

std::vector<std::vector<double>> to_rows(const Matrix& m) {
  std::vector<std::vector<double>> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out[r].assign(m.row(r).begin(), m.row(r).end());
  return out;
}

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix m(r, c);
  for (double& v : m.data()) v = z(rng);
  return m;
}

TEST(Conv2d, SingleElement) {
  Matrix x(1, 1, 1.0);
  ConvKernelSet k(1, 1, 1);
  k.values[0] = 2.5;
  auto y = conv2d(x, k);
  ASSERT_EQ(y.size(), 1u);
  EXPECT_EQ(y[0].rows(), 1u);
  EXPECT_EQ(y[0](0, 0), 2.5);
}

TEST(Conv2d, ImpulseReproducesKernel) {
  std::mt19937 rng(1);
  Matrix x(3, 4);
  x(0, 0) = 1.0;
  ConvKernelSet k(2, 2, 3);
  for (double& v : k.values) v = std::normal_distribution<double>(0.0, 1.0)(rng);
  auto maps = conv2d(x, k);
  for (std::size_t m = 0; m < 2; ++m) {
    ASSERT_EQ(maps[m].rows(), 4u);
    ASSERT_EQ(maps[m].cols(), 6u);
    auto kernel = k.kernel(m);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 6; ++j)
        EXPECT_EQ(maps[m](i, j), (i < 2 && j < 3) ? kernel(i, j) : 0.0);
  }
}

TEST(Conv2d, MatchesQuadrupleLoopOracle) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  for (int trial = 0; trial < 100; ++trial) {
    auto x = random_matrix(dim(rng), dim(rng), rng);
    ConvKernelSet k(1 + static_cast<std::size_t>(trial % 3), dim(rng) % 4 + 1, dim(rng) % 4 + 1);
    for (double& v : k.values) v = std::normal_distribution<double>(0.0, 1.0)(rng);
    auto maps = conv2d(x, k);
    for (std::size_t m = 0; m < k.count; ++m) {
      auto expected = oracle::convolve(to_rows(x), to_rows(k.kernel(m)));
      ASSERT_EQ(maps[m].rows(), expected.size());
      ASSERT_EQ(maps[m].cols(), expected[0].size());
      for (std::size_t i = 0; i < expected.size(); ++i)
        for (std::size_t j = 0; j < expected[i].size(); ++j)
          EXPECT_NEAR(maps[m](i, j), expected[i][j], 1e-12);
    }
  }
}

TEST(Conv2d, RejectsMalformedKernels) {
  Matrix x(2, 2, 1.0);
  EXPECT_THROW(conv2d(x, ConvKernelSet{}), ShapeError);
  ConvKernelSet bad(1, 2, 2);
  bad.values.pop_back();
  EXPECT_THROW(conv2d(x, bad), ShapeError);
  EXPECT_THROW(conv2d(Matrix(), ConvKernelSet(1, 1, 1)), ShapeError);
}

TEST(Model, ParameterLayout) {
  Model linear(ModelSpec::linear(AlphabetId::kA0));
  EXPECT_EQ(linear.params().size(), 25u * 12u + 25u);
  Model conv(ModelSpec{AlphabetId::kA0, 3, 4, {LayerSpec::conv(2, 2, 2), LayerSpec::dense(5)}});
  // conv: 2*1*2*2 + 2; map 2x4x5=40; dense 5*40+5; out 25*5+25
  EXPECT_EQ(conv.params().size(), 10u + 205u + 150u);
  EXPECT_EQ(conv.layers()[0].out.height, 4);
  EXPECT_EQ(conv.layers()[0].out.width, 5);
}

TEST(Forward, ZeroModelIsUniform) {
  Model m(ModelSpec::dense(AlphabetId::kA0, {8}));
  std::vector<std::vector<double>> batch = {std::vector<double>(12, 0.7), std::vector<double>(12, -3.0)};
  for (const auto& p : forward(m, batch)) {
    ASSERT_EQ(p.probabilities.size(), 25u);
    for (double v : p.probabilities) EXPECT_NEAR(v, 1.0 / 25.0, 1e-15);
  }
}

TEST(Forward, RowsSumToOneAndAreReproducible) {
  auto spec = ModelSpec{AlphabetId::kA1, 2, 12, {LayerSpec::conv(3, 2, 3), LayerSpec::dense(16)}};
  auto a = Model::initialized(spec, 99);
  auto b = Model::initialized(spec, 99);
  std::mt19937 rng(5);
  std::vector<std::vector<double>> batch(4, std::vector<double>(24));
  for (auto& f : batch) for (double& v : f) v = std::normal_distribution<double>(0.0, 1.0)(rng);
  auto pa = forward(a, batch);
  auto pb = forward(b, batch);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    ASSERT_EQ(pa[i].probabilities.size(), 73u);
    EXPECT_NEAR(std::accumulate(pa[i].probabilities.begin(), pa[i].probabilities.end(), 0.0), 1.0, 1e-9);
    EXPECT_EQ(pa[i].probabilities, pb[i].probabilities);  // bitwise
  }
}

TEST(Forward, ShapeError) {
  Model m(ModelSpec::linear(AlphabetId::kA0));
  std::vector<double> wrong(11, 0.0);
  EXPECT_THROW(predict(m, wrong), ShapeError);
}

// Model loss as a function of its parameters, for finite differences.
double model_loss(Model model, const std::vector<double>& params,
                  const std::vector<std::vector<double>>& frames,
                  const std::vector<std::vector<double>>& targets) {
  std::copy(params.begin(), params.end(), model.params().begin());
  std::vector<double> unused;
  return loss_and_gradient(model, frames, targets, unused);
}

TEST(Gradients, MatchFiniteDifferencesForDenseAndConvModels) {
  std::mt19937 rng(77);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    ModelSpec spec;
    spec.alphabet = AlphabetId::kA0;
    switch (trial % 4) {
      case 0: spec = ModelSpec::linear(AlphabetId::kA0); break;
      case 1: spec = ModelSpec::dense(AlphabetId::kA0, {6}); break;
      case 2: spec = {AlphabetId::kA0, 2, 3, {LayerSpec::conv(2, 2, 2), LayerSpec::dense(4)}}; break;
      case 3:
        spec = {AlphabetId::kA0, 2, 2, {LayerSpec::conv(2, 2, 1), LayerSpec::conv(2, 1, 2)}};
        break;
    }
    auto model = Model::initialized(spec, static_cast<std::uint64_t>(trial));
    for (double& p : model.params()) p += 0.1 * z(rng);  // non-zero biases too
    const std::size_t in = model.input_size();
    std::vector<std::vector<double>> frames(2, std::vector<double>(in));
    std::vector<std::vector<double>> targets(2, std::vector<double>(25));
    for (auto& f : frames) for (double& v : f) v = z(rng);
    for (auto& t : targets) for (double& v : t) v = u(rng);

    std::vector<double> grad;
    loss_and_gradient(model, frames, targets, grad);
    std::vector<double> params(model.params().begin(), model.params().end());
    auto numeric = oracle::central_differences(
        [&](std::vector<double>& p) { return model_loss(model, p, frames, targets); }, params);
    EXPECT_LT(oracle::relative_error(grad, numeric), 1e-5) << "trial " << trial;
  }
}

TEST(SynthDataset, CountsAndTemplates) {
  auto ds = synth_dataset(AlphabetId::kA0, 10, 0.0, 1);
  EXPECT_EQ(ds.size(), 250u);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto bits = pitch_vector(ChordClass(AlphabetId::kA0, ds.labels[i]));
    for (std::size_t pc = 0; pc < 12; ++pc) EXPECT_EQ(ds.frames[i][pc], bits.test(pc) ? 1.0 : 0.0);
  }
  EXPECT_EQ(synth_dataset(AlphabetId::kA2, 5, 0.1, 3).size(), 845u);
  auto a = synth_dataset(AlphabetId::kA1, 3, 0.2, 42);
  auto b = synth_dataset(AlphabetId::kA1, 3, 0.2, 42);
  EXPECT_EQ(a.frames, b.frames);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_NE(a.frames, synth_dataset(AlphabetId::kA1, 3, 0.2, 43).frames);
  EXPECT_THROW(synth_dataset(AlphabetId::kA0, 1, -0.1, 0), std::invalid_argument);
}

TEST(RandomSplit, PartitionsAllFrames) {
  auto ds = synth_dataset(AlphabetId::kA0, 4, 0.1, 5);
  auto split = random_split(ds, 0.6, 0.2, 9);
  EXPECT_EQ(split.train.size(), 60u);
  EXPECT_EQ(split.validation.size(), 20u);
  EXPECT_EQ(split.test.size(), 20u);
  auto splits = repeated_random_splits(ds, 5, 1);
  ASSERT_EQ(splits.size(), 5u);
  EXPECT_NE(splits[0].train.labels, splits[1].train.labels);
}

TEST(PlateauMonitor, ReducesAndStopsOnSchedule) {
  PlateauMonitor mon(3, 7);
  EXPECT_TRUE(mon.update(1.0).improved);
  std::vector<PlateauMonitor::Decision> ds;
  for (int i = 0; i < 7; ++i) ds.push_back(mon.update(1.0));
  EXPECT_FALSE(ds[1].reduce_lr);
  EXPECT_TRUE(ds[2].reduce_lr);
  EXPECT_TRUE(ds[5].reduce_lr);
  for (int i = 0; i < 6; ++i) EXPECT_FALSE(ds[static_cast<std::size_t>(i)].stop);
  EXPECT_TRUE(ds[6].stop);
  EXPECT_TRUE(mon.update(0.5).improved);
  EXPECT_FALSE(mon.update(0.6).stop);
}

TEST(Train, EmptyDatasetAndMismatch) {
  Model m(ModelSpec::linear(AlphabetId::kA0));
  Dataset empty;
  TrainConfig cfg;
  EXPECT_THROW(train(m, empty, empty, nullptr, cfg), EmptyDataset);
  auto a1 = synth_dataset(AlphabetId::kA1, 1, 0.0, 0);
  EXPECT_THROW(train(m, a1, a1, nullptr, cfg), AlphabetMismatch);
  cfg.learning_rate = 0.0;
  auto a0 = synth_dataset(AlphabetId::kA0, 1, 0.0, 0);
  EXPECT_THROW(train(m, a0, a0, nullptr, cfg), std::invalid_argument);
}

TEST(Train, FullBatchGradientDescentIsMonotone) {
  auto ds = synth_dataset(AlphabetId::kA0, 2, 0.0, 0);
  TrainConfig cfg;
  cfg.optimizer = OptimizerKind::kSgd;
  cfg.learning_rate = 0.1;
  cfg.max_epochs = 150;
  auto result = train(Model::initialized(ModelSpec::dense(AlphabetId::kA0, {16}), 3), ds, ds,
                      nullptr, cfg);
  ASSERT_EQ(result.history.size(), 150u);
  for (std::size_t i = 1; i < result.history.size(); ++i) {
    EXPECT_LE(result.history[i].train_loss, result.history[i - 1].train_loss) << "epoch " << i + 1;
  }
  EXPECT_LT(result.history.back().train_loss, result.history.front().train_loss);
}

TEST(Train, EarlyStopFiresAfterPatienceWithoutImprovement) {
  // Random labels on the validation set: validation loss stops improving.
  auto train_set = synth_dataset(AlphabetId::kA0, 4, 0.3, 1);
  auto val = synth_dataset(AlphabetId::kA0, 2, 0.3, 2);
  std::mt19937 rng(8);
  std::shuffle(val.labels.begin(), val.labels.end(), rng);
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.max_epochs = 500;
  cfg.plateau_patience = 5;
  cfg.early_stop_patience = 12;
  auto r = train(Model::initialized(ModelSpec::dense(AlphabetId::kA0, {32}), 4), train_set, val,
                 nullptr, cfg);
  ASSERT_TRUE(r.early_stopped);
  // Last improvement happened exactly `patience` epochs before the stop.
  double best = INFINITY;
  int best_epoch = 0;
  for (const auto& e : r.history) {
    if (e.val_loss < best) {
      best = e.val_loss;
      best_epoch = e.epoch;
    }
  }
  EXPECT_EQ(r.history.back().epoch, best_epoch + cfg.early_stop_patience);
  // Every reduction halves the rate.
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    const double ratio = r.history[i].learning_rate / r.history[i - 1].learning_rate;
    EXPECT_TRUE(ratio == 1.0 || ratio == 0.5);
  }
  EXPECT_LT(r.history.back().learning_rate, cfg.learning_rate);
}

TEST(Train, KeepsBestValidationAccuracySnapshot) {
  auto ds = synth_dataset(AlphabetId::kA0, 3, 0.4, 6);
  auto split = random_split(ds, 0.6, 0.4, 2);
  TrainConfig cfg;
  cfg.learning_rate = 0.02;
  cfg.max_epochs = 60;
  auto r = train(Model::initialized(ModelSpec::linear(AlphabetId::kA0), 1), split.train,
                 split.validation, nullptr, cfg);
  double best = -1.0;
  for (const auto& e : r.history) best = std::max(best, e.val_accuracy);
  EXPECT_EQ(r.history[static_cast<std::size_t>(r.best_epoch - 1)].val_accuracy, best);
  EXPECT_DOUBLE_EQ(accuracy(r.best, split.validation), best);
}

TEST(Train, DeterministicUnderSeed) {
  auto ds = synth_dataset(AlphabetId::kA0, 2, 0.2, 3);
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.max_epochs = 20;
  cfg.batch_size = 8;
  cfg.dropout = 0.2;
  cfg.input_noise_std = 0.1;
  cfg.seed = 17;
  auto spec = ModelSpec::dense(AlphabetId::kA0, {8});
  auto a = train(Model::initialized(spec, 1), ds, ds, nullptr, cfg);
  auto b = train(Model::initialized(spec, 1), ds, ds, nullptr, cfg);
  EXPECT_TRUE(std::equal(a.last.params().begin(), a.last.params().end(), b.last.params().begin()));
}

TEST(Train, NoiselessTemplatesSeparate) {
  auto ds = synth_dataset(AlphabetId::kA0, 10, 0.0, 0);
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.max_epochs = 200;
  auto r = train(Model::initialized(ModelSpec::linear(AlphabetId::kA0), 0), ds, ds, nullptr, cfg);
  EXPECT_GE(accuracy(r.best, ds), 0.99);
}

}  // namespace
}  // namespace chordlab
