#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "epsgreedy/core.hpp"
#include "epsgreedy/environments.hpp"
#include "epsgreedy/predictors.hpp"
#include "epsgreedy/random.hpp"

namespace epsgreedy {

/// A decision rule driven once per step: choose, then observe the outcome,
/// then end_of_step for any maintenance such as retraining.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const = 0;
  virtual std::size_t num_actions() const = 0;
  /// Learning policies read only sample.context; OptimalPolicy reads the oracle.
  virtual Decision choose(std::int64_t t, const ContextSample& sample, Rng& rng) = 0;
  virtual void observe(const StepRecord&) {}
  virtual void end_of_step(std::int64_t, const History&) {}
};

struct EpsilonGreedyOptions {
  double epsilon_exponent = 1.0;
  std::int64_t retrain_period = 20;
};

/// Epsilon-greedy over one reward predictor per arm, with exploration
/// probability min(1, t^-p). Predictor j is trained only on the steps where
/// arm j was played, every `retrain_period` steps, on all of them.
class EpsilonGreedyPolicy final : public Policy {
 public:
  EpsilonGreedyPolicy(std::vector<std::unique_ptr<Predictor>> predictors,
                      EpsilonGreedyOptions options, Rng training_rng,
                      std::string name = "eps-greedy");

  std::string_view name() const override { return name_; }
  std::size_t num_actions() const override { return predictors_.size(); }
  Decision choose(std::int64_t t, const ContextSample& sample, Rng& rng) override;
  void end_of_step(std::int64_t t, const History& history) override;

  std::vector<double> predictions(std::span<const double> context) const;
  /// Retrains every pulled arm when t is a multiple of the retrain period.
  /// Returns whether training ran.
  bool train_if_due(std::int64_t t, const History& history);

  const Predictor& predictor(std::size_t arm) const { return *predictors_.at(arm); }
  const EpsilonGreedyOptions& options() const noexcept { return options_; }

 private:
  std::vector<std::unique_ptr<Predictor>> predictors_;
  EpsilonGreedyOptions options_;
  Rng training_rng_;
  std::string name_;
};

/// Disjoint LinUCB: per arm B_j = I + sum x x^T and b_j = sum R x, score
/// theta_j . x + alpha sqrt(x^T B_j^-1 x) with theta_j = B_j^-1 b_j.
class LinUcbPolicy final : public Policy {
 public:
  LinUcbPolicy(std::size_t num_actions, std::size_t context_dim, double alpha = 1.0);

  std::string_view name() const override { return "linucb"; }
  std::size_t num_actions() const override { return arms_.size(); }
  Decision choose(std::int64_t t, const ContextSample& sample, Rng& rng) override;
  void observe(const StepRecord& record) override;

  /// Throws InvariantViolation when B_j is not numerically positive definite.
  double score(std::size_t arm, std::span<const double> context) const;
  void update(std::size_t arm, std::span<const double> context, double reward);

  const Eigen::MatrixXd& design(std::size_t arm) const { return arms_.at(arm).design; }
  const Eigen::VectorXd& response(std::size_t arm) const { return arms_.at(arm).response; }

 private:
  struct ArmState {
    Eigen::MatrixXd design;
    Eigen::VectorXd response;
    Eigen::LLT<Eigen::MatrixXd> factor;
  };
  std::vector<ArmState> arms_;
  double alpha_;
};

/// Greedy least squares without exploration; the chosen arm's model is
/// refit on all of its samples after every step.
class LinearGreedyPolicy final : public Policy {
 public:
  LinearGreedyPolicy(std::size_t num_actions, std::size_t context_dim, double ridge = 1e-8);

  std::string_view name() const override { return "linear"; }
  std::size_t num_actions() const override { return models_.size(); }
  Decision choose(std::int64_t t, const ContextSample& sample, Rng& rng) override;
  void observe(const StepRecord& record) override;

  const LinearModel& model(std::size_t arm) const { return models_.at(arm); }

 private:
  std::vector<LinearModel> models_;
  std::vector<Eigen::MatrixXd> gram_;
  std::vector<Eigen::VectorXd> moment_;
};

class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::size_t num_actions);

  std::string_view name() const override { return "random"; }
  std::size_t num_actions() const override { return num_actions_; }
  Decision choose(std::int64_t t, const ContextSample& sample, Rng& rng) override;

 private:
  std::size_t num_actions_;
};

/// Plays the lowest-index arm with zero gap.
class OptimalPolicy final : public Policy {
 public:
  explicit OptimalPolicy(std::size_t num_actions);

  std::string_view name() const override { return "optimal"; }
  std::size_t num_actions() const override { return num_actions_; }
  Decision choose(std::int64_t t, const ContextSample& sample, Rng& rng) override;

 private:
  std::size_t num_actions_;
};

/// Exact mean reward of one arm, read from the environment. Stands in for a
/// perfectly trained network.
class OraclePredictor final : public Predictor {
 public:
  OraclePredictor(const Environment& env, std::size_t arm);

  std::size_t input_dim() const override { return env_->context_dim(); }
  double predict(std::span<const double> x) const override;
  void fit(const TrainingSet&, Rng&) override {}

 private:
  const Environment* env_;
  std::size_t arm_;
};

enum class PolicyKind { kDeepEpsGreedy, kSimpleEpsGreedy, kLinUcb, kLinear, kRandom, kOptimal };

/// CLI names: deep-eps-greedy, simple-eps-greedy, linucb, linear, random, optimal.
PolicyKind parse_policy_kind(std::string_view name);
std::string_view policy_kind_name(PolicyKind kind) noexcept;

/// Builds a fresh policy for one run. Network weights come from the run's
/// model-init stream and shuffles from its training stream.
std::unique_ptr<Policy> make_policy(PolicyKind kind, const ExperimentConfig& config,
                                    const Environment& env, std::uint64_t run_seed);

/// The training set S_j of one arm gathered from the history.
TrainingSet arm_training_set(const History& history, std::size_t arm);

}  // namespace epsgreedy
