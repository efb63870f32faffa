#include "epsgreedy/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <string>
#include <thread>

#include "epsgreedy/errors.hpp"
#include "epsgreedy/theory.hpp"

namespace epsgreedy {

RunResult run_with_policy(const ExperimentConfig& config, const Environment& env, Policy& policy,
                          std::uint64_t run_seed) {
  config.validate();
  if (policy.num_actions() != env.num_actions()) {
    throw InvalidArgument("policy and environment disagree on the number of arms");
  }
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.config = config;
  result.env_name = std::string(env.name());
  result.policy_name = std::string(policy.name());
  result.seed = run_seed;
  result.history = History(env.num_actions());

  Rng context_rng(run_seed, Stream::kContext);
  Rng noise_rng(run_seed, Stream::kNoise);
  Rng policy_rng(run_seed, Stream::kPolicy);

  try {
    for (std::int64_t t = 1; t <= config.total_steps; ++t) {
      auto sample = env.sample_context(context_rng);
      const auto decision = policy.choose(t, sample, policy_rng);
      StepRecord record;
      record.t = t;
      record.action = decision.arm;
      record.branch = decision.branch;
      record.epsilon = decision.epsilon;
      record.reward = env.draw_reward(sample.oracle, decision.arm, noise_rng);
      record.optimal_mean = sample.oracle.optimal_mean();
      record.instant_regret = sample.oracle.gaps.at(decision.arm);
      record.context = std::move(sample.context);
      policy.observe(record);
      result.history.record_step(std::move(record));
      policy.end_of_step(t, result.history);
    }
  } catch (const TrainingDiverged& e) {
    result.error = e.what();
  }

  if (!result.history.empty()) {
    result.normalized_reward = normalized_reward_trace(result.history);
    result.normalized_optimal = normalized_optimal_trace(result.history);
    result.regret = normalized_regret_trace(result.history);
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

RunResult run_single(const ExperimentConfig& config, const Environment& env, PolicyKind policy,
                     std::uint64_t run_seed) {
  config.validate();
  auto instance = make_policy(policy, config, env, run_seed);
  return run_with_policy(config, env, *instance, run_seed);
}

RunResult run_single(const ExperimentConfig& config, const EnvSpec& spec, PolicyKind policy) {
  config.validate();
  const auto env = make_environment(spec, config);
  return run_single(config, *env, policy, config.rng_seed);
}

ReplicateSummary summarize(std::span<const RunResult> runs) {
  ReplicateSummary summary;
  summary.requested = runs.size();
  std::vector<const RunResult*> ok;
  for (const auto& run : runs) {
    summary.seeds.push_back(run.seed);
    if (run.ok()) {
      ok.push_back(&run);
    } else {
      summary.failures.push_back("seed " + std::to_string(run.seed) + ": " + *run.error);
    }
  }
  summary.replicates = ok.size();
  if (ok.empty()) return summary;

  const std::size_t steps = ok.front()->normalized_reward.size();
  const double n = static_cast<double>(ok.size());
  auto stats = [&](auto field, std::vector<double>& mean, std::vector<double>& stderr_out) {
    mean.assign(steps, 0.0);
    stderr_out.assign(steps, 0.0);
    for (std::size_t i = 0; i < steps; ++i) {
      double sum = 0.0;
      for (const auto* run : ok) sum += field(*run)[i];
      const double mu = sum / n;
      double sq = 0.0;
      for (const auto* run : ok) sq += (field(*run)[i] - mu) * (field(*run)[i] - mu);
      mean[i] = mu;
      stderr_out[i] = ok.size() > 1 ? std::sqrt(sq / (n - 1.0) / n) : 0.0;
    }
  };
  stats([](const RunResult& r) -> const std::vector<double>& { return r.normalized_reward; },
        summary.mean_normalized_reward, summary.stderr_normalized_reward);
  stats([](const RunResult& r) -> const std::vector<double>& { return r.regret; },
        summary.mean_regret, summary.stderr_regret);
  for (const auto* run : ok) summary.final_normalized_reward.push_back(run->normalized_reward.back());
  return summary;
}

ReplicateSummary run_replicates(const ExperimentConfig& config, const Environment& env,
                                PolicyKind policy, std::size_t replicates,
                                std::size_t parallelism) {
  if (replicates < 1) throw InvalidArgument("run_replicates: need at least one replicate");
  config.validate();
  std::vector<RunResult> runs(replicates);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto r = next.fetch_add(1); r < replicates; r = next.fetch_add(1)) {
      runs[r] = run_single(config, env, policy, config.rng_seed + r);
      runs[r].history = History(env.num_actions());  // traces are all the summary needs
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(parallelism, 1, replicates);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return summarize(runs);
}

LemmaCheckResult monte_carlo_lemma_check(std::size_t num_actions, double p, std::int64_t t,
                                         std::size_t replicates, Rng& rng,
                                         std::optional<double> threshold) {
  if (num_actions < 1) throw InvalidArgument("lemma check: need at least one arm");
  if (replicates < 1) throw InvalidArgument("lemma check: need at least one replicate");
  if (t < 2) throw InvalidArgument("lemma check: t must be >= 2");
  if (!(p > 0.0)) throw InvalidArgument("lemma check: p must be > 0");

  LemmaCheckResult result;
  result.replicates = replicates;
  const bool has_lemma = p <= 1.0;
  if (threshold) {
    result.threshold = *threshold;
  } else if (has_lemma) {
    result.threshold = lemma_threshold(static_cast<double>(t), num_actions, p);
  } else {
    throw InvalidArgument("lemma check: p > 1 has no lemma threshold; pass one explicitly");
  }
  if (has_lemma) result.bound = lemma_probability_bound(static_cast<double>(t), num_actions, p);

  std::vector<double> epsilon(static_cast<std::size_t>(t - 1));
  for (std::int64_t l = 1; l < t; ++l) epsilon[static_cast<std::size_t>(l - 1)] = epsilon_value(l, p);

  std::vector<std::size_t> pulls(num_actions);
  std::vector<double> pull_sums(num_actions, 0.0);
  std::size_t all_reached = 0;
  std::size_t any_reached = 0;
  for (std::size_t r = 0; r < replicates; ++r) {
    std::fill(pulls.begin(), pulls.end(), 0);
    for (double eps : epsilon) {
      if (rng.uniform() <= eps) ++pulls[rng.index(num_actions)];
    }
    const auto [lo, hi] = std::minmax_element(pulls.begin(), pulls.end());
    if (static_cast<double>(*lo) >= result.threshold) ++all_reached;
    if (static_cast<double>(*hi) >= result.threshold) ++any_reached;
    for (std::size_t i = 0; i < num_actions; ++i) pull_sums[i] += static_cast<double>(pulls[i]);
  }

  const double n = static_cast<double>(replicates);
  result.empirical = static_cast<double>(all_reached) / n;
  result.any_arm_reached = static_cast<double>(any_reached) / n;
  for (double s : pull_sums) result.mean_pulls.push_back(s / n);
  if (result.bound) {
    const double b = std::clamp(*result.bound, 0.0, 1.0);
    result.margin = 4.0 * std::sqrt(b * (1.0 - b) / n);
    result.pass = result.empirical >= *result.bound - result.margin;
  }
  return result;
}

double fit_loglog_slope(std::span<const double> trace, std::int64_t t_min, std::int64_t t_max) {
  if (t_min < 1 || t_max <= t_min) throw InvalidArgument("slope: need 1 <= t_min < t_max");
  if (static_cast<std::size_t>(t_max) > trace.size()) {
    throw InvalidArgument("slope: t_max beyond the end of the trace");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(t_max - t_min + 1);
  for (std::int64_t t = t_min; t <= t_max; ++t) {
    const double value = trace[static_cast<std::size_t>(t - 1)];
    if (!(value > 0.0)) {
      throw DomainError("slope: trace value at t=" + std::to_string(t) + " is not positive");
    }
    const double x = std::log(static_cast<double>(t));
    const double y = std::log(value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

MaxGapEstimate estimate_max_gap(const Environment& env, std::size_t samples, Rng& rng) {
  if (samples < 2) throw InvalidArgument("estimate_max_gap: need at least two samples");
  const auto k = env.num_actions();
  std::vector<double> sum(k, 0.0), sum_sq(k, 0.0);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto sample = env.sample_context(rng);
    for (std::size_t j = 0; j < k; ++j) {
      sum[j] += sample.oracle.gaps[j];
      sum_sq[j] += sample.oracle.gaps[j] * sample.oracle.gaps[j];
    }
  }
  const double n = static_cast<double>(samples);
  std::size_t best = 0;
  for (std::size_t j = 1; j < k; ++j) {
    if (sum[j] > sum[best]) best = j;
  }
  const double mean = sum[best] / n;
  const double var = std::max(0.0, (sum_sq[best] - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

}  // namespace epsgreedy
