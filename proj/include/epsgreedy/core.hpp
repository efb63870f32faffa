#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "epsgreedy/random.hpp"

namespace epsgreedy {

/// All parameters of one experiment run. Arms are indexed 0..K-1 in code;
/// time steps are 1-based.
struct ExperimentConfig {
  std::int64_t total_steps = 2000;
  std::size_t context_dim = 10;
  std::size_t num_actions = 5;
  double epsilon_exponent = 1.0;
  std::int64_t retrain_period = 20;
  std::int64_t train_epochs = 16;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  double noise_sigma = 0.0;
  std::uint64_t rng_seed = 1;
  std::vector<std::size_t> hidden_widths{100};
  std::vector<std::size_t> deep_hidden_widths{100, 100};
  double ridge = 1e-8;
  double linucb_alpha = 1.0;

  /// Throws InvalidArgument naming the first violated invariant.
  void validate() const;
};

enum class Branch { kGreedy, kExplore };

std::string_view branch_name(Branch branch) noexcept;

struct ExplorationDraw {
  double eta = 0.0;
  std::optional<std::size_t> rho;
};

struct Decision {
  std::size_t arm = 0;
  Branch branch = Branch::kGreedy;
  /// Exploration probability in force for this decision (0 for policies
  /// that never explore, 1 for uniform random play).
  double epsilon = 0.0;
  ExplorationDraw draw;
};

struct StepRecord {
  std::int64_t t = 0;
  std::vector<double> context;
  std::size_t action = 0;
  Branch branch = Branch::kGreedy;
  double epsilon = 0.0;
  double reward = 0.0;
  double optimal_mean = 0.0;
  double instant_regret = 0.0;
};

/// Everything Algorithm-1 style policies accumulate: the ordered step records
/// plus per-arm index sets and pull counters.
class History {
 public:
  explicit History(std::size_t num_actions);

  /// Appends a record. Throws InvalidState unless record.t == size() + 1 and
  /// InvalidArgument when the action is out of range.
  void record_step(StepRecord record);

  std::size_t num_actions() const noexcept { return pulls_.size(); }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const std::vector<StepRecord>& records() const noexcept { return records_; }
  const StepRecord& at(std::int64_t t) const;

  /// T_j(t) for t = size() + 1: pulls of `arm` so far.
  std::size_t pulls(std::size_t arm) const { return pulls_.at(arm); }
  /// T_j^R(t): pulls of `arm` through the exploration branch.
  std::size_t exploration_pulls(std::size_t arm) const { return exploration_pulls_.at(arm); }
  /// S_j: strictly increasing 1-based time indices at which `arm` was chosen.
  const std::vector<std::int64_t>& arm_steps(std::size_t arm) const { return arm_steps_.at(arm); }

 private:
  std::vector<StepRecord> records_;
  std::vector<std::vector<std::int64_t>> arm_steps_;
  std::vector<std::size_t> pulls_;
  std::vector<std::size_t> exploration_pulls_;
};

/// min(1, t^-p). Throws InvalidArgument for t < 1 or p <= 0.
double epsilon_value(std::int64_t t, double p);

/// Lowest index among the maxima.
std::size_t argmax_lowest(std::span<const double> values);

/// One epsilon-greedy decision: draws eta ~ U[0,1); greedy argmax when
/// eta > epsilon, otherwise a uniform arm rho.
Decision select_action(std::span<const double> predictions, double epsilon, Rng& rng);

/// Element t-1 is (R_1 + ... + R_t) / t.
std::vector<double> normalized_reward_trace(const History& history);
/// Same prefix mean over the per-step optimal means mu_*(X_t).
std::vector<double> normalized_optimal_trace(const History& history);
/// Element t-1 is (sum of instant regret up to t) / t; never negative.
std::vector<double> normalized_regret_trace(const History& history);

/// Pointwise optimal_trace - method_trace.
std::vector<double> regret_trace(std::span<const double> method_trace,
                                 std::span<const double> optimal_trace);

std::vector<double> prefix_mean(std::span<const double> values);

}  // namespace epsgreedy
