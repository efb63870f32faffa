#include "epsgreedy/core.hpp"

#include <cmath>
#include <string>

#include "epsgreedy/errors.hpp"

namespace epsgreedy {

void ExperimentConfig::validate() const {
  if (total_steps < 1) throw InvalidArgument("total_steps must be >= 1");
  if (context_dim < 1) throw InvalidArgument("context_dim must be >= 1");
  if (num_actions < 2) throw InvalidArgument("num_actions must be >= 2");
  if (!(epsilon_exponent > 0.0)) throw InvalidArgument("epsilon_exponent must be > 0");
  if (retrain_period < 1) throw InvalidArgument("retrain_period must be >= 1");
  if (train_epochs < 1) throw InvalidArgument("train_epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise_sigma must be >= 0");
  if (!(ridge >= 0.0)) throw InvalidArgument("ridge must be >= 0");
  if (!(linucb_alpha >= 0.0)) throw InvalidArgument("linucb_alpha must be >= 0");
  for (auto w : hidden_widths) {
    if (w == 0) throw InvalidArgument("hidden_widths entries must be positive");
  }
  for (auto w : deep_hidden_widths) {
    if (w == 0) throw InvalidArgument("deep_hidden_widths entries must be positive");
  }
}

std::string_view branch_name(Branch branch) noexcept {
  return branch == Branch::kGreedy ? "greedy" : "explore";
}

History::History(std::size_t num_actions)
    : arm_steps_(num_actions), pulls_(num_actions, 0), exploration_pulls_(num_actions, 0) {
  if (num_actions == 0) throw InvalidArgument("History needs at least one arm");
}

void History::record_step(StepRecord record) {
  const auto expected = static_cast<std::int64_t>(records_.size()) + 1;
  if (record.t != expected) {
    throw InvalidState("record_step: expected t=" + std::to_string(expected) +
                       ", got t=" + std::to_string(record.t));
  }
  if (record.action >= pulls_.size()) {
    throw InvalidArgument("record_step: action " + std::to_string(record.action) +
                          " out of range");
  }
  const auto arm = record.action;
  arm_steps_[arm].push_back(record.t);
  ++pulls_[arm];
  if (record.branch == Branch::kExplore) ++exploration_pulls_[arm];
  records_.push_back(std::move(record));
}

const StepRecord& History::at(std::int64_t t) const {
  if (t < 1 || t > static_cast<std::int64_t>(records_.size())) {
    throw InvalidArgument("History::at: t=" + std::to_string(t) + " out of range");
  }
  return records_[static_cast<std::size_t>(t - 1)];
}

double epsilon_value(std::int64_t t, double p) {
  if (t < 1) throw InvalidArgument("epsilon_value: t must be >= 1");
  if (!(p > 0.0)) throw InvalidArgument("epsilon_value: p must be > 0");
  return std::min(1.0, std::pow(static_cast<double>(t), -p));
}

std::size_t argmax_lowest(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("argmax of empty vector");
  std::size_t best = 0;
  for (std::size_t j = 1; j < values.size(); ++j) {
    if (values[j] > values[best]) best = j;
  }
  return best;
}

Decision select_action(std::span<const double> predictions, double epsilon, Rng& rng) {
  if (predictions.size() < 2) {
    throw InvalidArgument("select_action: need at least two predictions");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InvalidArgument("select_action: epsilon must lie in [0, 1]");
  }
  Decision decision;
  decision.epsilon = epsilon;
  decision.draw.eta = rng.uniform();
  if (decision.draw.eta > epsilon) {
    decision.arm = argmax_lowest(predictions);
    decision.branch = Branch::kGreedy;
  } else {
    decision.draw.rho = rng.index(predictions.size());
    decision.arm = *decision.draw.rho;
    decision.branch = Branch::kExplore;
  }
  return decision;
}

std::vector<double> prefix_mean(std::span<const double> values) {
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    out[i] = sum / static_cast<double>(i + 1);
  }
  return out;
}

namespace {

template <typename Field>
std::vector<double> trace_of(const History& history, Field field) {
  if (history.empty()) throw InvalidArgument("trace of empty history");
  std::vector<double> values;
  values.reserve(history.size());
  for (const auto& r : history.records()) values.push_back(field(r));
  return prefix_mean(values);
}

}  // namespace

std::vector<double> normalized_reward_trace(const History& history) {
  return trace_of(history, [](const StepRecord& r) { return r.reward; });
}

std::vector<double> normalized_optimal_trace(const History& history) {
  return trace_of(history, [](const StepRecord& r) { return r.optimal_mean; });
}

std::vector<double> normalized_regret_trace(const History& history) {
  return trace_of(history, [](const StepRecord& r) { return r.instant_regret; });
}

std::vector<double> regret_trace(std::span<const double> method_trace,
                                 std::span<const double> optimal_trace) {
  if (method_trace.size() != optimal_trace.size()) {
    throw InvalidArgument("regret_trace: trace lengths differ");
  }
  std::vector<double> out(method_trace.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = optimal_trace[i] - method_trace[i];
  return out;
}

}  // namespace epsgreedy
