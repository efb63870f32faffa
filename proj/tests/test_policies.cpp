#include <cmath>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "epsgreedy/errors.hpp"
#include "epsgreedy/harness.hpp"
#include "epsgreedy/policies.hpp"

namespace epsgreedy {
namespace {

// Predictor returning a fixed value; counts fit calls.
class FixedPredictor final : public Predictor {
 public:
  FixedPredictor(std::size_t dim, double value) : dim_(dim), value_(value) {}
  std::size_t input_dim() const override { return dim_; }
  double predict(std::span<const double>) const override { return value_; }
  void fit(const TrainingSet& data, Rng&) override {
    ++fits;
    last_size = data.size();
  }
  int fits = 0;
  std::size_t last_size = 0;

 private:
  std::size_t dim_;
  double value_;
};

ContextSample sample_with(std::vector<double> context, std::vector<double> means) {
  return {std::move(context), Oracle::from_means(std::move(means))};
}

StepRecord record(std::int64_t t, std::size_t action, std::vector<double> context, double reward) {
  StepRecord r;
  r.t = t;
  r.action = action;
  r.context = std::move(context);
  r.reward = reward;
  return r;
}

std::unique_ptr<EpsilonGreedyPolicy> fixed_policy(std::vector<double> values,
                                                  std::vector<FixedPredictor*>* handles = nullptr,
                                                  std::int64_t period = 20) {
  std::vector<std::unique_ptr<Predictor>> preds;
  for (double v : values) {
    auto p = std::make_unique<FixedPredictor>(2, v);
    if (handles) handles->push_back(p.get());
    preds.push_back(std::move(p));
  }
  return std::make_unique<EpsilonGreedyPolicy>(std::move(preds), EpsilonGreedyOptions{1.0, period},
                                               Rng(1));
}

TEST(EpsGreedy, GreedyDominatesForLargeT) {
  auto policy = fixed_policy({0.0, 5.0});
  Rng rng(2);
  const auto s = sample_with({0.0, 0.0}, {0.0, 0.0});
  const std::int64_t t = 1000000;
  int chose_second = 0;
  for (int i = 0; i < 1000; ++i) chose_second += policy->choose(t, s, rng).arm == 1 ? 1 : 0;
  EXPECT_GE(chose_second, 995);
}

TEST(EpsGreedy, FirstStepAlwaysExplores) {
  auto policy = fixed_policy({0.0, 5.0, 1.0});
  Rng rng(3);
  const auto s = sample_with({0.0, 0.0}, {0.0, 0.0, 0.0});
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 30000; ++i) {
    const Decision d = policy->choose(1, s, rng);
    EXPECT_EQ(d.branch, Branch::kExplore);
    EXPECT_EQ(d.epsilon, 1.0);
    ++counts[d.arm];
  }
  for (int c : counts) EXPECT_NEAR(c / 30000.0, 1.0 / 3.0, 4.0 * std::sqrt(2.0 / 9.0 / 30000.0));
}

TEST(EpsGreedy, ChoiceReplaysSelectActionOnRawOutputs) {
  ExperimentConfig config;
  config.hidden_widths = {8};
  CodebookEnv env(5, 0.0);
  auto policy = make_policy(PolicyKind::kSimpleEpsGreedy, config, env, 77);
  auto* eg = dynamic_cast<EpsilonGreedyPolicy*>(policy.get());
  ASSERT_NE(eg, nullptr);
  Rng ctx(5);
  for (std::int64_t t = 1; t <= 50; ++t) {
    const auto s = env.sample_context(ctx);
    const auto preds = eg->predictions(s.context);
    Rng a(static_cast<std::uint64_t>(t)), b(static_cast<std::uint64_t>(t));
    const Decision expected = select_action(preds, epsilon_value(t, 1.0), a);
    const Decision got = policy->choose(t, s, b);
    EXPECT_EQ(got.arm, expected.arm);
    EXPECT_EQ(got.branch, expected.branch);
  }
}

TEST(EpsGreedy, RetrainsOnlyOnSchedule) {
  std::vector<FixedPredictor*> handles;
  auto policy = fixed_policy({0.0, 0.0, 0.0}, &handles, 20);
  History h(3);
  for (std::int64_t t = 1; t <= 21; ++t) {
    h.record_step(record(t, t % 2 == 0 ? 0u : 1u, {0.0, 1.0}, 1.0));
    const bool trained = policy->train_if_due(t, h);
    EXPECT_EQ(trained, t == 20);
  }
  EXPECT_EQ(handles[0]->fits, 1);
  EXPECT_EQ(handles[1]->fits, 1);
  EXPECT_EQ(handles[0]->last_size, 10u);
  EXPECT_EQ(handles[1]->last_size, 10u);
  EXPECT_EQ(handles[2]->fits, 0);
}

TEST(EpsGreedy, EveryStepWhenPeriodIsOne) {
  std::vector<FixedPredictor*> handles;
  auto policy = fixed_policy({0.0, 0.0}, &handles, 1);
  History h(2);
  for (std::int64_t t = 1; t <= 5; ++t) {
    h.record_step(record(t, 0, {0.0, 0.0}, 0.0));
    policy->end_of_step(t, h);
  }
  EXPECT_EQ(handles[0]->fits, 5);
  EXPECT_EQ(handles[1]->fits, 0);
}

TEST(EpsGreedy, TrainingSetHoldsOnlyThatArmsSteps) {
  History h(2);
  h.record_step(record(1, 1, {1.0, 2.0}, 3.0));
  h.record_step(record(2, 0, {4.0, 5.0}, 6.0));
  h.record_step(record(3, 1, {7.0, 8.0}, 9.0));
  const TrainingSet s = arm_training_set(h, 1);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.inputs(0, 0), 1.0);
  EXPECT_EQ(s.inputs(1, 1), 8.0);
  EXPECT_EQ(s.targets(1), 9.0);
}

TEST(EpsGreedy, OracleRegretIsExplorationTerm) {
  ConstantGapEnv env(3, 1.0, 0.0);
  std::vector<std::unique_ptr<Predictor>> preds;
  for (std::size_t j = 0; j < 3; ++j) preds.push_back(std::make_unique<OraclePredictor>(env, j));
  EpsilonGreedyPolicy policy(std::move(preds), {1.0, 20}, Rng(1));
  Rng ctx(4), rng(5);
  const std::int64_t t = 4;
  const double eps = epsilon_value(t, 1.0);
  constexpr int n = 100000;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto s = env.sample_context(ctx);
    const Decision d = policy.choose(t, s, rng);
    if (d.branch == Branch::kGreedy) {
      EXPECT_EQ(d.arm, s.oracle.optimal_arm);
    }
    total += s.oracle.gaps[d.arm];
  }
  // sum of gaps per context = 2, so expected regret = eps * 2 / 3.
  const double expected = eps * 2.0 / 3.0;
  const double q = eps * 2.0 / 3.0;
  EXPECT_NEAR(total / n, expected, 4.0 * std::sqrt(q * (1.0 - q) / n));
}

TEST(LinUcb, InitialScoreIsNorm) {
  LinUcbPolicy p(2, 3);
  const std::vector<double> x{3.0, 4.0, 0.0};
  EXPECT_NEAR(p.score(0, x), 5.0, 1e-12);
  EXPECT_EQ(p.score(1, std::vector<double>{0.0, 0.0, 0.0}), 0.0);
}

TEST(LinUcb, ScoreAfterOneUpdateMatches2x2Solve) {
  LinUcbPolicy p(2, 2);
  p.update(0, std::vector<double>{1.0, 0.0}, 1.0);
  // B = [[2,0],[0,1]], b = [1,0]; solve by hand-written 2x2 inverse.
  const double b00 = 2.0, b01 = 0.0, b10 = 0.0, b11 = 1.0;
  const double det = b00 * b11 - b01 * b10;
  const double i00 = b11 / det, i01 = -b01 / det, i10 = -b10 / det, i11 = b00 / det;
  const double theta0 = i00 * 1.0 + i01 * 0.0, theta1 = i10 * 1.0 + i11 * 0.0;
  const double x0 = 1.0, x1 = 0.0;
  const double quad = x0 * (i00 * x0 + i01 * x1) + x1 * (i10 * x0 + i11 * x1);
  const double expected = theta0 * x0 + theta1 * x1 + std::sqrt(quad);
  EXPECT_NEAR(p.score(0, std::vector<double>{1.0, 0.0}), expected, 1e-12);
  EXPECT_NEAR(expected, 0.5 + std::sqrt(0.5), 1e-15);
}

TEST(LinUcb, ZeroContextLeavesStateUnchanged) {
  LinUcbPolicy p(2, 3);
  p.update(1, std::vector<double>{0.0, 0.0, 0.0}, 5.0);
  EXPECT_TRUE(p.design(1).isApprox(Eigen::MatrixXd::Identity(3, 3)));
  EXPECT_EQ(p.response(1).norm(), 0.0);
}

TEST(LinUcb, UpdatesCommute) {
  LinUcbPolicy a(2, 2), b(2, 2);
  const std::vector<double> x{1.0, 2.0}, y{-0.5, 3.0};
  a.update(0, x, 1.0);
  a.update(0, y, 2.0);
  b.update(0, y, 2.0);
  b.update(0, x, 1.0);
  EXPECT_TRUE(a.design(0).isApprox(b.design(0)));
}

TEST(LinUcb, DesignEqualsReplayedOuterProducts) {
  ExperimentConfig config;
  config.total_steps = 300;
  config.noise_sigma = 0.5;
  CodebookEnv env(5, 0.5);
  LinUcbPolicy policy(5, 10);
  const RunResult run = run_with_policy(config, env, policy, 13);
  for (std::size_t j = 0; j < 5; ++j) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(10, 10);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(10);
    for (const auto& rec : run.history.records()) {
      if (rec.action != j) continue;
      const Eigen::Map<const Eigen::VectorXd> x(rec.context.data(), 10);
      b += x * x.transpose();
      r += rec.reward * x;
    }
    EXPECT_LT((policy.design(j) - b).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((policy.response(j) - r).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_TRUE(policy.design(j).isApprox(policy.design(j).transpose()));
  }
}

TEST(LinUcb, NonPositiveDefiniteDesignIsReported) {
  LinUcbPolicy p(2, 2);
  p.update(0, std::vector<double>{std::nan(""), 0.0}, 1.0);
  EXPECT_THROW(p.score(0, std::vector<double>{1.0, 0.0}), InvariantViolation);
}

TEST(LinearGreedy, ZeroModelsPickFirstArm) {
  LinearGreedyPolicy p(3, 2);
  Rng rng(1);
  const Decision d = p.choose(1, sample_with({1.0, 1.0}, {0, 0, 0}), rng);
  EXPECT_EQ(d.arm, 0u);
  EXPECT_EQ(d.branch, Branch::kGreedy);
}

TEST(LinearGreedy, PicksLargestPrediction) {
  LinearGreedyPolicy p(2, 2, 0.0);
  p.observe(record(1, 0, {1.0, 0.0}, 1.0));
  Rng rng(1);
  EXPECT_NEAR(p.model(0).weights()(0), 1.0, 1e-12);
  EXPECT_EQ(p.choose(2, sample_with({1.0, 0.3}, {0, 0}), rng).arm, 0u);
  EXPECT_EQ(p.choose(2, sample_with({-1.0, 0.3}, {0, 0}), rng).arm, 1u);
}

TEST(LinearGreedy, RecoversNoiselessLinearMeans) {
  Rng setup(3);
  LinearEnv env(4, 2, 0.0, setup);
  ExperimentConfig config;
  config.total_steps = 500;
  config.context_dim = 4;
  config.num_actions = 2;
  LinearGreedyPolicy policy(2, 4);
  const RunResult run = run_with_policy(config, env, policy, 4);
  Rng fresh(99);
  int checked = 0;
  for (std::size_t j = 0; j < 2; ++j) {
    if (run.history.pulls(j) < 20) continue;
    ++checked;
    for (int i = 0; i < 50; ++i) {
      const auto s = env.sample_context(fresh);
      EXPECT_NEAR(policy.model(j).predict(s.context), s.oracle.means[j], 1e-6);
    }
  }
  EXPECT_GE(checked, 1);
}

TEST(Optimal, PicksZeroGapArm) {
  OptimalPolicy p(2);
  Rng rng(1);
  EXPECT_EQ(p.choose(1, sample_with({0.0}, {3.0, 0.0}), rng).arm, 0u);
  EXPECT_EQ(p.choose(1, sample_with({0.0}, {1.0, 1.0}), rng).arm, 0u);
}

TEST(Optimal, RunHasZeroRegret) {
  ExperimentConfig config;
  config.total_steps = 200;
  config.noise_sigma = 1.0;
  CodebookEnv env(5, 1.0);
  const RunResult run = run_single(config, env, PolicyKind::kOptimal, 3);
  for (double r : run.regret) EXPECT_EQ(r, 0.0);
}

TEST(Random, ArmsAreUniform) {
  RandomPolicy p(4);
  Rng rng(8);
  std::vector<int> counts(4, 0);
  const auto s = sample_with({0.0}, {0, 0, 0, 0});
  for (int i = 0; i < 40000; ++i) {
    const Decision d = p.choose(i + 1, s, rng);
    EXPECT_EQ(d.branch, Branch::kExplore);
    ++counts[d.arm];
  }
  for (int c : counts) EXPECT_NEAR(c / 40000.0, 0.25, 4.0 * std::sqrt(0.1875 / 40000.0));
}

TEST(Factory, NamesRoundTrip) {
  for (auto kind : {PolicyKind::kDeepEpsGreedy, PolicyKind::kSimpleEpsGreedy, PolicyKind::kLinUcb,
                    PolicyKind::kLinear, PolicyKind::kRandom, PolicyKind::kOptimal}) {
    EXPECT_EQ(parse_policy_kind(policy_kind_name(kind)), kind);
  }
  EXPECT_THROW(parse_policy_kind("ucb1"), InvalidArgument);
}

TEST(Factory, DeepHasTwoHiddenLayersSimpleHasOne) {
  ExperimentConfig config;
  CodebookEnv env(5, 0.0);
  auto deep = make_policy(PolicyKind::kDeepEpsGreedy, config, env, 1);
  auto simple = make_policy(PolicyKind::kSimpleEpsGreedy, config, env, 1);
  const auto& d = dynamic_cast<const MlpModel&>(
      dynamic_cast<EpsilonGreedyPolicy&>(*deep).predictor(0));
  const auto& s = dynamic_cast<const MlpModel&>(
      dynamic_cast<EpsilonGreedyPolicy&>(*simple).predictor(0));
  EXPECT_EQ(d.dims(), (std::vector<std::size_t>{10, 100, 100, 1}));
  EXPECT_EQ(s.dims(), (std::vector<std::size_t>{10, 100, 1}));
}

}  // namespace
}  // namespace epsgreedy
