#include "epsgreedy/policies.hpp"

#include <cmath>
#include <string>

#include "epsgreedy/errors.hpp"

namespace epsgreedy {

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> x) {
  return {x.data(), static_cast<Eigen::Index>(x.size())};
}

Decision greedy(std::span<const double> scores) {
  Decision decision;
  decision.arm = argmax_lowest(scores);
  decision.branch = Branch::kGreedy;
  decision.epsilon = 0.0;
  return decision;
}

}  // namespace

TrainingSet arm_training_set(const History& history, std::size_t arm) {
  const auto& steps = history.arm_steps(arm);
  TrainingSet set;
  if (steps.empty()) return set;
  const auto m = static_cast<Eigen::Index>(history.at(steps.front()).context.size());
  set.inputs.resize(static_cast<Eigen::Index>(steps.size()), m);
  set.targets.resize(static_cast<Eigen::Index>(steps.size()));
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& record = history.at(steps[i]);
    set.inputs.row(static_cast<Eigen::Index>(i)) = as_vector(record.context).transpose();
    set.targets(static_cast<Eigen::Index>(i)) = record.reward;
  }
  return set;
}

// EpsilonGreedyPolicy

EpsilonGreedyPolicy::EpsilonGreedyPolicy(std::vector<std::unique_ptr<Predictor>> predictors,
                                         EpsilonGreedyOptions options, Rng training_rng,
                                         std::string name)
    : predictors_(std::move(predictors)),
      options_(options),
      training_rng_(std::move(training_rng)),
      name_(std::move(name)) {
  if (predictors_.size() < 2) throw InvalidArgument("epsilon greedy needs at least two arms");
  for (const auto& p : predictors_) {
    if (!p) throw InvalidArgument("epsilon greedy: null predictor");
  }
  if (!(options_.epsilon_exponent > 0.0)) throw InvalidArgument("epsilon exponent must be > 0");
  if (options_.retrain_period < 1) throw InvalidArgument("retrain period must be >= 1");
}

std::vector<double> EpsilonGreedyPolicy::predictions(std::span<const double> context) const {
  std::vector<double> out;
  out.reserve(predictors_.size());
  for (const auto& p : predictors_) out.push_back(p->predict(context));
  return out;
}

Decision EpsilonGreedyPolicy::choose(std::int64_t t, const ContextSample& sample, Rng& rng) {
  const double epsilon = epsilon_value(t, options_.epsilon_exponent);
  return select_action(predictions(sample.context), epsilon, rng);
}

bool EpsilonGreedyPolicy::train_if_due(std::int64_t t, const History& history) {
  if (t % options_.retrain_period != 0) return false;
  for (std::size_t arm = 0; arm < predictors_.size(); ++arm) {
    const auto data = arm_training_set(history, arm);
    if (data.empty()) continue;
    try {
      predictors_[arm]->fit(data, training_rng_);
    } catch (const TrainingDiverged& e) {
      throw TrainingDiverged(name_ + ": arm " + std::to_string(arm + 1) + " at t=" +
                             std::to_string(t) + ": " + e.what());
    }
  }
  return true;
}

void EpsilonGreedyPolicy::end_of_step(std::int64_t t, const History& history) {
  train_if_due(t, history);
}

// LinUcbPolicy

LinUcbPolicy::LinUcbPolicy(std::size_t num_actions, std::size_t context_dim, double alpha)
    : alpha_(alpha) {
  if (num_actions < 2) throw InvalidArgument("linucb needs at least two arms");
  if (context_dim == 0) throw InvalidArgument("linucb needs a nonempty context");
  const auto m = static_cast<Eigen::Index>(context_dim);
  arms_.resize(num_actions);
  for (auto& arm : arms_) {
    arm.design = Eigen::MatrixXd::Identity(m, m);
    arm.response = Eigen::VectorXd::Zero(m);
    arm.factor.compute(arm.design);
  }
}

double LinUcbPolicy::score(std::size_t arm, std::span<const double> context) const {
  const auto& state = arms_.at(arm);
  if (static_cast<Eigen::Index>(context.size()) != state.design.rows()) {
    throw InvalidArgument("linucb score: dimension mismatch");
  }
  if (state.factor.info() != Eigen::Success) {
    throw InvariantViolation("linucb: design matrix of arm " + std::to_string(arm + 1) +
                             " is not positive definite");
  }
  const auto x = as_vector(context);
  const Eigen::VectorXd theta = state.factor.solve(state.response);
  const double width = x.dot(state.factor.solve(x));
  if (!(width >= 0.0)) {
    throw InvariantViolation("linucb: negative confidence width for arm " + std::to_string(arm + 1));
  }
  return theta.dot(x) + alpha_ * std::sqrt(width);
}

void LinUcbPolicy::update(std::size_t arm, std::span<const double> context, double reward) {
  auto& state = arms_.at(arm);
  if (static_cast<Eigen::Index>(context.size()) != state.design.rows()) {
    throw InvalidArgument("linucb update: dimension mismatch");
  }
  const auto x = as_vector(context);
  state.design.noalias() += x * x.transpose();
  state.response += reward * x;
  state.factor.compute(state.design);
}

Decision LinUcbPolicy::choose(std::int64_t, const ContextSample& sample, Rng&) {
  std::vector<double> scores(arms_.size());
  for (std::size_t j = 0; j < arms_.size(); ++j) scores[j] = score(j, sample.context);
  return greedy(scores);
}

void LinUcbPolicy::observe(const StepRecord& record) {
  update(record.action, record.context, record.reward);
}

// LinearGreedyPolicy

LinearGreedyPolicy::LinearGreedyPolicy(std::size_t num_actions, std::size_t context_dim,
                                       double ridge) {
  if (num_actions < 2) throw InvalidArgument("linear policy needs at least two arms");
  const auto m = static_cast<Eigen::Index>(context_dim);
  for (std::size_t j = 0; j < num_actions; ++j) {
    models_.emplace_back(context_dim, ridge);
    gram_.push_back(Eigen::MatrixXd::Zero(m, m));
    moment_.push_back(Eigen::VectorXd::Zero(m));
  }
}

Decision LinearGreedyPolicy::choose(std::int64_t, const ContextSample& sample, Rng&) {
  std::vector<double> scores(models_.size());
  for (std::size_t j = 0; j < models_.size(); ++j) scores[j] = models_[j].predict(sample.context);
  return greedy(scores);
}

void LinearGreedyPolicy::observe(const StepRecord& record) {
  const auto arm = record.action;
  const auto x = as_vector(record.context);
  gram_.at(arm).noalias() += x * x.transpose();
  moment_[arm] += record.reward * x;
  models_[arm].fit_moments(gram_[arm], moment_[arm]);
}

// RandomPolicy / OptimalPolicy

RandomPolicy::RandomPolicy(std::size_t num_actions) : num_actions_(num_actions) {
  if (num_actions < 2) throw InvalidArgument("random policy needs at least two arms");
}

Decision RandomPolicy::choose(std::int64_t, const ContextSample&, Rng& rng) {
  Decision decision;
  decision.draw.rho = rng.index(num_actions_);
  decision.arm = *decision.draw.rho;
  decision.branch = Branch::kExplore;
  decision.epsilon = 1.0;
  return decision;
}

OptimalPolicy::OptimalPolicy(std::size_t num_actions) : num_actions_(num_actions) {
  if (num_actions < 2) throw InvalidArgument("optimal policy needs at least two arms");
}

Decision OptimalPolicy::choose(std::int64_t, const ContextSample& sample, Rng&) {
  if (sample.oracle.gaps.size() != num_actions_) {
    throw InvalidArgument("optimal policy: oracle has the wrong number of arms");
  }
  Decision decision;
  decision.arm = sample.oracle.optimal_arm;
  decision.branch = Branch::kGreedy;
  return decision;
}

// OraclePredictor

OraclePredictor::OraclePredictor(const Environment& env, std::size_t arm) : env_(&env), arm_(arm) {
  if (arm >= env.num_actions()) throw InvalidArgument("oracle predictor: arm out of range");
}

double OraclePredictor::predict(std::span<const double> x) const {
  return env_->mean_rewards(x)[arm_];
}

// Factory

PolicyKind parse_policy_kind(std::string_view name) {
  if (name == "deep-eps-greedy") return PolicyKind::kDeepEpsGreedy;
  if (name == "simple-eps-greedy") return PolicyKind::kSimpleEpsGreedy;
  if (name == "linucb") return PolicyKind::kLinUcb;
  if (name == "linear") return PolicyKind::kLinear;
  if (name == "random") return PolicyKind::kRandom;
  if (name == "optimal") return PolicyKind::kOptimal;
  throw InvalidArgument("unknown policy '" + std::string(name) + "'");
}

std::string_view policy_kind_name(PolicyKind kind) noexcept {
  switch (kind) {
    case PolicyKind::kDeepEpsGreedy: return "deep-eps-greedy";
    case PolicyKind::kSimpleEpsGreedy: return "simple-eps-greedy";
    case PolicyKind::kLinUcb: return "linucb";
    case PolicyKind::kLinear: return "linear";
    case PolicyKind::kRandom: return "random";
    case PolicyKind::kOptimal: return "optimal";
  }
  return "unknown";
}

std::unique_ptr<Policy> make_policy(PolicyKind kind, const ExperimentConfig& config,
                                    const Environment& env, std::uint64_t run_seed) {
  const auto k = env.num_actions();
  const auto m = env.context_dim();
  switch (kind) {
    case PolicyKind::kDeepEpsGreedy:
    case PolicyKind::kSimpleEpsGreedy: {
      const auto& hidden = kind == PolicyKind::kDeepEpsGreedy ? config.deep_hidden_widths
                                                              : config.hidden_widths;
      const MlpTraining training{config.train_epochs, config.learning_rate, config.batch_size};
      Rng init(run_seed, Stream::kModelInit);
      std::vector<std::unique_ptr<Predictor>> predictors;
      for (std::size_t j = 0; j < k; ++j) {
        predictors.push_back(
            std::make_unique<MlpModel>(MlpModel::initialized(m, hidden, training, init)));
      }
      return std::make_unique<EpsilonGreedyPolicy>(
          std::move(predictors),
          EpsilonGreedyOptions{config.epsilon_exponent, config.retrain_period},
          Rng(run_seed, Stream::kTraining), std::string(policy_kind_name(kind)));
    }
    case PolicyKind::kLinUcb:
      return std::make_unique<LinUcbPolicy>(k, m, config.linucb_alpha);
    case PolicyKind::kLinear:
      return std::make_unique<LinearGreedyPolicy>(k, m, config.ridge);
    case PolicyKind::kRandom:
      return std::make_unique<RandomPolicy>(k);
    case PolicyKind::kOptimal:
      return std::make_unique<OptimalPolicy>(k);
  }
  throw InvalidArgument("unhandled policy kind");
}

}  // namespace epsgreedy
