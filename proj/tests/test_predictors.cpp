#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "epsgreedy/errors.hpp"
#include "epsgreedy/predictors.hpp"

namespace epsgreedy {
namespace {

// Straight loop forward pass, independent of the Eigen code path.
double reference_forward(const MlpModel& model, const std::vector<double>& x) {
  std::vector<double> a = x;
  const auto& layers = model.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& w = layers[l].weights;
    std::vector<double> z(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      double s = layers[l].bias(r);
      for (Eigen::Index c = 0; c < w.cols(); ++c) s += w(r, c) * a[static_cast<std::size_t>(c)];
      z[static_cast<std::size_t>(r)] = (l + 1 < layers.size()) ? std::max(0.0, s) : s;
    }
    a = std::move(z);
  }
  return a[0];
}

TrainingSet random_set(std::size_t n, std::size_t m, Rng& rng) {
  TrainingSet s;
  s.inputs.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  s.targets.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < s.inputs.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.inputs.cols(); ++j) s.inputs(i, j) = rng.normal();
    s.targets(i) = rng.normal();
  }
  return s;
}

std::vector<double> row_of(const Eigen::MatrixXd& m, Eigen::Index i) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(j)] = m(i, j);
  return out;
}

std::vector<double> flatten(const MlpGradient& g) {
  std::vector<double> out;
  for (const auto& layer : g) {
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) out.push_back(layer.weights(r, c));
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) out.push_back(layer.bias(r));
  }
  return out;
}

TEST(Mlp, ZeroModelPredictsZero) {
  MlpModel model({3, 4, 1});
  EXPECT_EQ(model.predict(std::vector<double>{1.0, -2.0, 5.0}), 0.0);
}

TEST(Mlp, SingleLayerIsAffine) {
  MlpModel model({3, 1});
  model.layers()[0].weights << 1.5, -2.0, 0.25;
  model.layers()[0].bias << 0.75;
  EXPECT_DOUBLE_EQ(model.predict(std::vector<double>{2.0, 1.0, 4.0}), 3.0 - 2.0 + 1.0 + 0.75);
}

TEST(Mlp, ForwardMatchesReferenceImplementation) {
  Rng rng(17);
  const std::vector<std::size_t> hidden{5, 4};
  for (int trial = 0; trial < 20; ++trial) {
    const MlpModel model = MlpModel::initialized(6, hidden, {}, rng);
    for (int i = 0; i < 10; ++i) {
      std::vector<double> x(6);
      for (auto& v : x) v = rng.normal();
      EXPECT_NEAR(model.predict(x), reference_forward(model, x), 1e-12);
    }
  }
}

TEST(Mlp, DimensionMismatchRejected) {
  MlpModel model({3, 1});
  EXPECT_THROW(model.predict(std::vector<double>{1.0}), InvalidArgument);
}

TEST(Mlp, GlorotInitRangeAndZeroBias) {
  Rng rng(1);
  const std::vector<std::size_t> hidden{100, 100};
  const MlpModel model = MlpModel::initialized(10, hidden, {}, rng);
  ASSERT_EQ(model.dims(), (std::vector<std::size_t>{10, 100, 100, 1}));
  for (const auto& layer : model.layers()) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.weights.rows() + layer.weights.cols()));
    EXPECT_LE(layer.weights.cwiseAbs().maxCoeff(), limit);
    EXPECT_GT(layer.weights.cwiseAbs().maxCoeff(), 0.5 * limit);
    EXPECT_EQ(layer.bias.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Mlp, GradientMatchesCentralDifferences) {
  Rng rng(99);
  constexpr double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t depth = 1 + rng.index(3);
    std::vector<std::size_t> hidden;
    for (std::size_t l = 0; l + 1 < depth; ++l) hidden.push_back(1 + rng.index(8));
    const std::size_t m = 1 + rng.index(8);
    MlpModel model = MlpModel::initialized(m, hidden, {}, rng);
    for (auto& layer : model.layers()) {
      for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = 0.1 * rng.normal();
    }
    const TrainingSet batch = random_set(1 + rng.index(6), m, rng);
    const auto analytic = flatten(model.gradient(batch.inputs, batch.targets));
    auto theta = model.parameters();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double saved = theta[i];
      theta[i] = saved + h;
      model.set_parameters(theta);
      const double up = model.mse(batch);
      theta[i] = saved - h;
      model.set_parameters(theta);
      const double down = model.mse(batch);
      theta[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-4});
      worst = std::max(worst, std::abs(numeric - analytic[i]) / scale);
    }
    model.set_parameters(theta);
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(Mlp, InterpolatingModelHasZeroGradient) {
  MlpModel model({2, 1});
  model.layers()[0].weights << 1.0, 2.0;
  TrainingSet s;
  s.inputs.resize(3, 2);
  s.inputs << 1, 0, 0, 1, 1, 1;
  s.targets.resize(3);
  s.targets << 1, 2, 3;
  for (double g : flatten(model.gradient(s.inputs, s.targets))) EXPECT_EQ(g, 0.0);
}

TEST(Mlp, DuplicatedBatchGivesSameGradient) {
  Rng rng(5);
  const std::vector<std::size_t> hidden{4};
  const MlpModel model = MlpModel::initialized(3, hidden, {}, rng);
  const TrainingSet s = random_set(5, 3, rng);
  Eigen::MatrixXd x2(10, 3);
  x2 << s.inputs, s.inputs;
  Eigen::VectorXd y2(10);
  y2 << s.targets, s.targets;
  const auto a = flatten(model.gradient(s.inputs, s.targets));
  const auto b = flatten(model.gradient(x2, y2));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
}

TEST(Mlp, EmptyBatchRejected) {
  MlpModel model({2, 1});
  EXPECT_THROW(model.gradient(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0)), InvalidArgument);
}

TEST(Mlp, SinglePointInterpolation) {
  Rng rng(3);
  MlpModel model = MlpModel::initialized(3, {}, {}, rng);
  TrainingSet s;
  s.inputs.resize(1, 3);
  s.inputs << 0.5, -1.0, 2.0;
  s.targets.resize(1);
  s.targets << 4.0;
  model.fit(s, 2000, 0.05, rng);
  EXPECT_NEAR(model.predict(row_of(s.inputs, 0)), 4.0, 1e-3);
}

TEST(Mlp, EmptySetAndZeroEpochsAreNoOps) {
  Rng rng(4);
  const std::vector<std::size_t> hidden{5};
  MlpModel model = MlpModel::initialized(3, hidden, {}, rng);
  const auto before = model.parameters();
  model.fit(TrainingSet{Eigen::MatrixXd(0, 3), Eigen::VectorXd(0)}, rng);
  EXPECT_EQ(model.parameters(), before);
  model.fit(random_set(10, 3, rng), 0, 1e-3, rng);
  EXPECT_EQ(model.parameters(), before);
}

TEST(Mlp, FitIsBitReproducible) {
  const std::vector<std::size_t> hidden{8, 8};
  Rng data_rng(6);
  const TrainingSet s = random_set(50, 4, data_rng);
  std::vector<double> params[2];
  for (auto& p : params) {
    Rng init(10), train(11);
    MlpModel model = MlpModel::initialized(4, hidden, {16, 1e-3, 32}, init);
    model.fit(s, train);
    model.fit(s, train);
    p = model.parameters();
  }
  EXPECT_EQ(params[0], params[1]);
}

TEST(Mlp, WarmStartContinuesFromCurrentParameters) {
  const std::vector<std::size_t> hidden{6};
  Rng data_rng(8);
  const TrainingSet s = random_set(40, 3, data_rng);
  Rng init(1);
  const MlpModel start = MlpModel::initialized(3, hidden, {}, init);

  MlpModel warm = start;
  Rng train(2);
  warm.fit(s, 4, 1e-2, train);
  const MlpModel midway = warm;
  const Rng saved = train;
  warm.fit(s, 4, 1e-2, train);

  // Replaying the second call from the midway parameters reproduces it.
  MlpModel replay = midway;
  Rng replay_rng = saved;
  replay.fit(s, 4, 1e-2, replay_rng);
  EXPECT_EQ(warm.parameters(), replay.parameters());

  // Starting the second call from the initial parameters does not.
  MlpModel cold = start;
  Rng cold_rng = saved;
  cold.fit(s, 4, 1e-2, cold_rng);
  EXPECT_NE(warm.parameters(), cold.parameters());
  EXPECT_LT(warm.mse(s), cold.mse(s));
}

TEST(Mlp, SixteenEpochsReduceMseOnLinearData) {
  Rng rng(21);
  TrainingSet s;
  s.inputs.resize(100, 5);
  s.targets.resize(100);
  const std::vector<double> w{1.0, -2.0, 0.5, 3.0, -1.0};
  for (Eigen::Index i = 0; i < 100; ++i) {
    double y = 0.0;
    for (Eigen::Index j = 0; j < 5; ++j) {
      s.inputs(i, j) = rng.normal();
      y += w[static_cast<std::size_t>(j)] * s.inputs(i, j);
    }
    s.targets(i) = y;
  }
  const std::vector<std::size_t> hidden{100};
  MlpModel model = MlpModel::initialized(5, hidden, {}, rng);
  const double before = model.mse(s);
  model.fit(s, rng);
  EXPECT_LT(model.mse(s), before);
}

TEST(Mlp, DivergenceIsReported) {
  Rng rng(2);
  const std::vector<std::size_t> hidden{8};
  MlpModel model = MlpModel::initialized(3, hidden, {}, rng);
  TrainingSet s = random_set(32, 3, rng);
  s.targets *= 1e6;
  EXPECT_THROW(model.fit(s, 50, 1e3, rng), TrainingDiverged);
}

TEST(Mlp, SerializeRoundTrip) {
  Rng rng(30);
  const std::vector<std::size_t> hidden{3, 2};
  const MlpModel model = MlpModel::initialized(4, hidden, {}, rng);
  const auto flat = model.serialize();
  ASSERT_EQ(flat.size(), 1 + 4 + model.parameter_count());
  EXPECT_EQ(flat[0], 4.0);
  const MlpModel back = MlpModel::deserialize(flat);
  EXPECT_EQ(back.dims(), model.dims());
  EXPECT_EQ(back.parameters(), model.parameters());
}

TEST(Linear, RecoversGeneratingWeights) {
  Rng rng(40);
  TrainingSet s = random_set(50, 6, rng);
  Eigen::VectorXd truth(6);
  for (Eigen::Index j = 0; j < 6; ++j) truth(j) = rng.normal();
  s.targets = s.inputs * truth;
  const LinearModel fit = linear_fit(s, 0.0);
  EXPECT_LT((fit.weights() - truth).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Linear, ZeroTargetsGiveZeroModel) {
  Rng rng(41);
  TrainingSet s = random_set(20, 4, rng);
  s.targets.setZero();
  EXPECT_EQ(linear_fit(s, 1e-8).weights().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(linear_fit(TrainingSet{Eigen::MatrixXd(0, 4), Eigen::VectorXd(0)}, 0.0)
                .weights()
                .cwiseAbs()
                .maxCoeff(),
            0.0);
}

TEST(Linear, SingleSampleMinimumNorm) {
  TrainingSet s;
  s.inputs = Eigen::MatrixXd::Zero(1, 3);
  s.inputs(0, 0) = 1.0;
  s.targets = Eigen::VectorXd::Constant(1, 2.0);
  const LinearModel fit = linear_fit(s, 0.0);
  EXPECT_NEAR(fit.weights()(0), 2.0, 1e-12);
  EXPECT_NEAR(fit.weights()(1), 0.0, 1e-12);
  EXPECT_NEAR(fit.weights()(2), 0.0, 1e-12);
}

TEST(Linear, RankDeficientMatchesPseudoInverse) {
  Rng rng(43);
  TrainingSet s = random_set(8, 5, rng);
  s.inputs.col(4) = s.inputs.col(0) + s.inputs.col(1);
  const LinearModel fit = linear_fit(s, 0.0);
  const Eigen::MatrixXd pinv = s.inputs.completeOrthogonalDecomposition().pseudoInverse();
  EXPECT_LT((fit.weights() - pinv * s.targets).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Linear, PerturbationNeverImprovesObjective) {
  Rng rng(44);
  for (double ridge : {0.0, 1e-8, 0.5}) {
    const TrainingSet s = random_set(30, 4, rng);
    const LinearModel fit = linear_fit(s, ridge);
    auto objective = [&](const Eigen::VectorXd& b) {
      return (s.targets - s.inputs * b).squaredNorm() + ridge * b.squaredNorm();
    };
    const double best = objective(fit.weights());
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd dir(4);
      for (Eigen::Index j = 0; j < 4; ++j) dir(j) = rng.normal();
      dir *= 1e-3 / dir.norm();
      EXPECT_GE(objective(fit.weights() + dir), best);
    }
  }
}

TEST(Linear, InvariantToRowOrder) {
  Rng rng(45);
  const TrainingSet s = random_set(25, 3, rng);
  TrainingSet reversed = s;
  reversed.inputs = s.inputs.colwise().reverse();
  reversed.targets = s.targets.reverse();
  EXPECT_LT((linear_fit(s, 1e-8).weights() - linear_fit(reversed, 1e-8).weights())
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(Linear, NonFiniteDataRejected) {
  Rng rng(46);
  TrainingSet s = random_set(5, 2, rng);
  s.targets(2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(linear_fit(s, 0.0), InvalidArgument);
}

TEST(Linear, PredictExamples) {
  LinearModel zero(3);
  EXPECT_EQ(zero.predict(std::vector<double>{4, 5, 6}), 0.0);
  LinearModel unit(3);
  unit.set_weights(Eigen::Vector3d(1, 0, 0));
  EXPECT_EQ(unit.predict(std::vector<double>{3, 7, 8}), 3.0);
  EXPECT_THROW(unit.predict(std::vector<double>{3}), InvalidArgument);

  Rng rng(47);
  Eigen::VectorXd b(7);
  std::vector<double> x(7);
  double dot = 0.0;
  for (std::size_t j = 0; j < 7; ++j) {
    b(static_cast<Eigen::Index>(j)) = rng.normal();
    x[j] = rng.normal();
    dot += b(static_cast<Eigen::Index>(j)) * x[j];
  }
  LinearModel model(7);
  model.set_weights(b);
  EXPECT_NEAR(model.predict(x), dot, 1e-12);
}

}  // namespace
}  // namespace epsgreedy
