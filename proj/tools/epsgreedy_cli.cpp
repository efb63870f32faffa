// epsgreedy: run bandit experiments, tabulate regret bounds, check the
// exploration-count bound by simulation, and fit log-log regret slopes.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "epsgreedy/config.hpp"
#include "epsgreedy/csv.hpp"
#include "epsgreedy/errors.hpp"
#include "epsgreedy/harness.hpp"
#include "epsgreedy/theory.hpp"

using namespace epsgreedy;

namespace {

struct RunArgs {
  std::string config_path;
  std::string env;
  std::string policy;
  std::size_t replicates = 1;
  std::string out = "-";
  std::size_t parallelism = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> steps;
  std::optional<double> sigma;
  std::optional<double> exponent;
  std::string images_path;
  std::string labels_path;
  std::optional<std::size_t> pool_factor;
};

struct TheoryArgs {
  std::size_t k = 5;
  std::vector<double> p{1.0};
  double delta = 1.0;
  double t_min = 1e3;
  double t_max = 1e12;
  double c = 1.0;
  double n = 3.0;
  double max_gap = 9.0;
  std::size_t points = 20;
};

struct LemmaArgs {
  std::size_t k = 2;
  double p = 1.0;
  std::int64_t t = 1000;
  std::size_t replicates = 10000;
  std::uint64_t seed = 1;
  std::optional<double> threshold;
};

struct SlopeArgs {
  std::string in;
  std::int64_t t_min = 1;
  std::int64_t t_max = 0;
};

template <typename Write>
void to_output(const std::string& out, Write write) {
  if (out == "-") {
    write(std::cout);
    return;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) throw IoError("cannot open " + out + " for writing");
  write(file);
  if (!file) throw IoError("write failed: " + out);
}

int do_run(const RunArgs& a) {
  LoadedConfig loaded = a.config_path.empty() ? LoadedConfig{} : load_config(a.config_path);
  if (!a.env.empty()) loaded.env.kind = parse_env_kind(a.env);
  if (!a.policy.empty()) loaded.policy = parse_policy_kind(a.policy);
  if (a.seed) loaded.config.rng_seed = *a.seed;
  if (a.steps) loaded.config.total_steps = *a.steps;
  if (a.sigma) loaded.config.noise_sigma = *a.sigma;
  if (a.exponent) loaded.config.epsilon_exponent = *a.exponent;
  if (!a.images_path.empty()) loaded.env.images_path = a.images_path;
  if (!a.labels_path.empty()) loaded.env.labels_path = a.labels_path;
  if (a.pool_factor) loaded.env.pool_factor = *a.pool_factor;
  if (a.replicates == 0) throw InvalidArgument("--replicates must be >= 1");

  const auto env = make_environment(loaded.env, loaded.config);
  loaded.config.context_dim = env->context_dim();
  loaded.config.num_actions = env->num_actions();
  loaded.config.validate();

  if (a.replicates == 1) {
    const RunResult result = run_single(loaded.config, *env, loaded.policy, loaded.config.rng_seed);
    to_output(a.out, [&](std::ostream& os) { write_run_csv(result, os); });
    if (!result.ok()) {
      std::cerr << "run failed: " << *result.error << '\n';
      return 3;
    }
    return 0;
  }
  const ReplicateSummary summary =
      run_replicates(loaded.config, *env, loaded.policy, a.replicates, a.parallelism);
  to_output(a.out, [&](std::ostream& os) { write_summary_csv(summary, os); });
  for (const auto& failure : summary.failures) std::cerr << "replicate failed: " << failure << '\n';
  return summary.replicates == 0 ? 3 : 0;
}

std::string real_or_nan(double (*f)(const TheoryParams&, double), const TheoryParams& params,
                        double t) {
  try {
    return format_real(f(params, t));
  } catch (const DomainError&) {
    return "nan";
  }
}

int do_theory(const TheoryArgs& a) {
  std::cout << "t,p,lower_bound,upper_bound,lemma_threshold,lemma_prob_bound\n";
  for (const double p : a.p) {
    TheoryParams params;
    params.num_actions = a.k;
    params.exponent = p;
    params.gap = a.delta;
    params.constants.assign(a.k, a.c);
    params.min_sizes.assign(a.k, a.n);
    params.max_gap = a.max_gap;
    for (const double t : log_grid(a.t_min, a.t_max, a.points)) {
      std::cout << format_real(t) << ',' << format_real(p) << ','
                << format_real(regret_lower_bound(params, t)) << ','
                << real_or_nan(regret_upper_bound, params, t) << ',';
      if (p <= 1.0) {
        std::cout << format_real(lemma_threshold(t, a.k, p)) << ','
                  << format_real(lemma_probability_bound(t, a.k, p)) << '\n';
      } else {
        std::cout << "nan,nan\n";
      }
    }
  }
  return 0;
}

int do_lemma(const LemmaArgs& a) {
  Rng rng(a.seed, Stream::kLemma);
  const auto r = monte_carlo_lemma_check(a.k, a.p, a.t, a.replicates, rng, a.threshold);
  std::printf("threshold %.6g\n", r.threshold);
  std::printf("empirical %.6f\n", r.empirical);
  if (r.bound) {
    std::printf("bound %.6f\n", *r.bound);
    std::printf("margin %.6f\n", r.margin);
  } else {
    std::printf("bound none\n");
  }
  std::printf("any_arm_reached %.6f\n", r.any_arm_reached);
  for (std::size_t i = 0; i < r.mean_pulls.size(); ++i) {
    std::printf("mean_pulls[%zu] %.6f\n", i + 1, r.mean_pulls[i]);
  }
  std::printf("%s\n", r.pass ? "PASS" : "FAIL");
  return r.pass ? 0 : 1;
}

int do_slope(const SlopeArgs& a) {
  const auto trace = load_regret_trace(a.in);
  const std::int64_t t_max = a.t_max > 0 ? a.t_max : static_cast<std::int64_t>(trace.size());
  std::printf("%.6f\n", fit_loglog_slope(trace, a.t_min, t_max));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Epsilon-greedy contextual bandits with neural and linear reward models"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment, or replicates of it, to CSV");
  run_cmd->add_option("--config", run.config_path, "key = value config file");
  run_cmd->add_option("--env", run.env, "codebook | linear | mnist | gap");
  run_cmd->add_option("--policy", run.policy,
                      "deep-eps-greedy | simple-eps-greedy | linucb | linear | random | optimal");
  run_cmd->add_option("--replicates", run.replicates, "independent runs (seeds seed..seed+R-1)");
  run_cmd->add_option("--out", run.out, "output CSV path, - for stdout");
  run_cmd->add_option("--parallelism", run.parallelism, "worker threads")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.seed, "base seed");
  run_cmd->add_option("--steps", run.steps, "horizon M");
  run_cmd->add_option("--sigma", run.sigma, "reward noise standard deviation");
  run_cmd->add_option("--p", run.exponent, "exploration exponent");
  run_cmd->add_option("--images-path", run.images_path, "IDX image file (mnist env)");
  run_cmd->add_option("--labels-path", run.labels_path, "IDX label file (mnist env)");
  run_cmd->add_option("--pool-factor", run.pool_factor, "average-pooling block size (mnist env)");

  TheoryArgs theory;
  auto* theory_cmd = app.add_subcommand("theory", "Tabulate regret bounds on a log grid of t");
  theory_cmd->add_option("--k", theory.k, "arms");
  theory_cmd->add_option("--p", theory.p, "exploration exponents")->delimiter(',');
  theory_cmd->add_option("--delta", theory.delta, "optimality gap");
  theory_cmd->add_option("--t-min", theory.t_min);
  theory_cmd->add_option("--t-max", theory.t_max);
  theory_cmd->add_option("--c", theory.c, "regressor constant C_i, all arms");
  theory_cmd->add_option("--n", theory.n, "regressor minimum sample size n_i, all arms");
  theory_cmd->add_option("--max-gap", theory.max_gap, "largest expected gap");
  theory_cmd->add_option("--points", theory.points)->check(CLI::PositiveNumber);

  LemmaArgs lemma;
  auto* lemma_cmd =
      app.add_subcommand("lemma-check", "Simulate exploration counts against their bound");
  lemma_cmd->add_option("--k", lemma.k);
  lemma_cmd->add_option("--p", lemma.p);
  lemma_cmd->add_option("--t", lemma.t);
  lemma_cmd->add_option("--replicates", lemma.replicates);
  lemma_cmd->add_option("--seed", lemma.seed);
  lemma_cmd->add_option("--threshold", lemma.threshold, "override the count threshold");

  SlopeArgs slope;
  auto* slope_cmd = app.add_subcommand("slope", "Log-log slope of a regret trace from a CSV");
  slope_cmd->add_option("--in", slope.in)->required();
  slope_cmd->add_option("--t-min", slope.t_min);
  slope_cmd->add_option("--t-max", slope.t_max, "defaults to the trace length");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return do_run(run);
    if (*theory_cmd) return do_theory(theory);
    if (*lemma_cmd) return do_lemma(lemma);
    if (*slope_cmd) return do_slope(slope);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
