#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epsgreedy/config.hpp"
#include "epsgreedy/core.hpp"
#include "epsgreedy/environments.hpp"
#include "epsgreedy/policies.hpp"
#include "epsgreedy/random.hpp"

namespace epsgreedy {

struct RunResult {
  ExperimentConfig config;
  std::string env_name;
  std::string policy_name;
  std::uint64_t seed = 0;
  History history{2};
  std::vector<double> normalized_reward;
  /// Prefix mean of mu_*(X_t).
  std::vector<double> normalized_optimal;
  /// Prefix mean of instant regret mu_*(X_t) - mu_{D_t}(X_t).
  std::vector<double> regret;
  double wall_seconds = 0.0;
  /// Set when training diverged; the traces then cover the completed steps.
  std::optional<std::string> error;

  bool ok() const noexcept { return !error.has_value(); }
};

/// Drives `policy` for config.total_steps steps: sample context, choose, draw
/// reward, record, observe, end-of-step maintenance. Deterministic in
/// run_seed.
RunResult run_with_policy(const ExperimentConfig& config, const Environment& env, Policy& policy,
                          std::uint64_t run_seed);

RunResult run_single(const ExperimentConfig& config, const Environment& env, PolicyKind policy,
                     std::uint64_t run_seed);
/// Builds the environment from `spec` and runs with config.rng_seed.
RunResult run_single(const ExperimentConfig& config, const EnvSpec& spec, PolicyKind policy);

struct ReplicateSummary {
  std::size_t requested = 0;
  /// Successful runs the statistics are computed over.
  std::size_t replicates = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> mean_normalized_reward;
  std::vector<double> stderr_normalized_reward;
  std::vector<double> mean_regret;
  std::vector<double> stderr_regret;
  /// Final normalized reward of each successful run, in seed order.
  std::vector<double> final_normalized_reward;
  std::vector<std::string> failures;
};

/// Replicate r runs with seed config.rng_seed + r. Runs are spread over
/// `parallelism` threads; results are merged in seed order, so the summary
/// does not depend on the thread count.
ReplicateSummary run_replicates(const ExperimentConfig& config, const Environment& env,
                                PolicyKind policy, std::size_t replicates,
                                std::size_t parallelism = 1);

ReplicateSummary summarize(std::span<const RunResult> runs);

struct LemmaCheckResult {
  std::size_t replicates = 0;
  double threshold = 0.0;
  /// Fraction of replicates with min_i T_i^R(t) >= threshold.
  double empirical = 0.0;
  /// Lemma probability bound; absent when p > 1.
  std::optional<double> bound;
  double margin = 0.0;
  bool pass = true;
  /// Mean of T_i^R(t) over replicates, per arm.
  std::vector<double> mean_pulls;
  /// Fraction of replicates in which any arm reached the threshold.
  double any_arm_reached = 0.0;
};

/// Simulates only the exploration branch: at each step l < t, with
/// probability min(1, l^-p) a uniformly chosen arm gets an exploration pull.
/// The threshold defaults to lemma_threshold(t, K, p) and must be given when
/// p > 1. Passes iff empirical >= bound - 4 sqrt(bound (1 - bound) / n).
LemmaCheckResult monte_carlo_lemma_check(std::size_t num_actions, double p, std::int64_t t,
                                         std::size_t replicates, Rng& rng,
                                         std::optional<double> threshold = std::nullopt);

/// OLS slope of ln(trace[t-1]) against ln(t) for t in [t_min, t_max].
double fit_loglog_slope(std::span<const double> trace, std::int64_t t_min, std::int64_t t_max);

struct MaxGapEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// max_i of the sample mean of Delta_i(X) over `samples` contexts.
MaxGapEstimate estimate_max_gap(const Environment& env, std::size_t samples, Rng& rng);

}  // namespace epsgreedy
