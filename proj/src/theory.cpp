#include "epsgreedy/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "epsgreedy/errors.hpp"

namespace epsgreedy {

namespace {

void check_lemma_args(double t, std::size_t k, double p) {
  if (k < 1) throw InvalidArgument("number of arms must be >= 1");
  if (!(t >= 2.0)) throw InvalidArgument("lemma requires t >= 2");
  if (!(p > 0.0 && p <= 1.0)) {
    throw InvalidArgument("lemma requires 0 < p <= 1 (no lemma in the starvation regime)");
  }
}

void check_params(const TheoryParams& params) {
  if (params.num_actions < 1) throw InvalidArgument("num_actions must be >= 1");
  if (!(params.exponent > 0.0)) throw InvalidArgument("exponent must be > 0");
  if (!(params.gap > 0.0)) throw InvalidArgument("gap delta must be > 0");
}

std::string describe(double value) {
  std::ostringstream os;
  os.precision(10);
  os << value;
  return os.str();
}

}  // namespace

double TheoryParams::max_constant() const {
  if (constants.empty()) throw ConfigurationError("regressor constants C_i not supplied");
  for (double c : constants) {
    if (!(c > 0.0)) throw ConfigurationError("regressor constants C_i must be > 0");
  }
  return *std::max_element(constants.begin(), constants.end());
}

double TheoryParams::c0() const { return 8.0 * std::numbers::sqrt2 * max_constant(); }

double TheoryParams::c0_prime() const {
  if (!(exponent < 1.0)) throw DomainError("C_0' is defined only for p < 1");
  return 8.0 * std::sqrt(2.0 * (1.0 - exponent)) * max_constant();
}

double expected_exploration_pulls(std::int64_t t, std::size_t num_actions, double p) {
  if (t < 2) throw InvalidArgument("expected_exploration_pulls requires t >= 2");
  if (num_actions < 1) throw InvalidArgument("number of arms must be >= 1");
  if (!(p > 0.0)) throw InvalidArgument("exponent must be > 0");
  double sum = 0.0;
  for (std::int64_t l = 1; l < t; ++l) sum += std::pow(static_cast<double>(l), -p);
  return sum / static_cast<double>(num_actions);
}

double lemma_threshold(double t, std::size_t num_actions, double p) {
  check_lemma_args(t, num_actions, p);
  const double k = static_cast<double>(num_actions);
  if (p == 1.0) return std::log(t) / (2.0 * k);
  return std::exp((1.0 - p) * std::log(t)) / (2.0 * (1.0 - p) * k);
}

double lemma_probability_bound(double t, std::size_t num_actions, double p) {
  check_lemma_args(t, num_actions, p);
  const double k = static_cast<double>(num_actions);
  const double rate = p == 1.0
                          ? 3.0 * std::log(t) / (28.0 * k)
                          : 3.0 * std::exp((1.0 - p) * std::log(t)) / (28.0 * (1.0 - p) * k);
  return 1.0 - std::exp(std::log(k) - rate);
}

double min_valid_t(const TheoryParams& params) {
  check_params(params);
  if (params.min_sizes.empty()) {
    throw ConfigurationError("minimal training sizes n_i not supplied");
  }
  const double n_max = *std::max_element(params.min_sizes.begin(), params.min_sizes.end());
  const double floor = std::max(std::numbers::e, n_max);
  const double k = static_cast<double>(params.num_actions);
  const double p = params.exponent;
  if (p == 1.0) return std::exp(2.0 * k * floor);
  if (p > 1.0) throw DomainError("no regret theorem for p > 1 (starvation regime)");
  return std::pow(2.0 * (1.0 - p) * k * floor, 1.0 / (1.0 - p));
}

double regret_upper_bound(const TheoryParams& params, double t) {
  check_params(params);
  const double p = params.exponent;
  if (p > 1.0) throw DomainError("no regret theorem for p > 1 (starvation regime)");
  const double t0 = min_valid_t(params);
  if (!(t > t0)) {
    throw DomainError("regret_upper_bound: t=" + describe(t) + " must exceed t_0=" +
                      describe(t0));
  }
  const double k = static_cast<double>(params.num_actions);
  const double log_t = std::log(t);
  const double scale = std::pow(k, 1.5) / params.gap;
  if (p == 1.0) {
    const double radicand = (std::log(log_t) - std::log(2.0 * k)) / log_t;
    if (!(radicand > 0.0)) {
      throw DomainError("regret_upper_bound: ln ln t must exceed ln 2K at t=" + describe(t));
    }
    return params.max_gap / t + scale * params.c0() * std::sqrt(radicand);
  }
  const double log_effective = (1.0 - p) * log_t;  // ln t^(1-p)
  const double numerator = log_effective - std::log(2.0 * (1.0 - p) * k);
  if (!(numerator > 0.0)) {
    throw DomainError("regret_upper_bound: ln t^(1-p) must exceed ln(2(1-p)K) at t=" +
                      describe(t));
  }
  const double radicand = numerator * std::exp(-log_effective);
  return params.max_gap * std::exp(-p * log_t) + scale * params.c0_prime() * std::sqrt(radicand);
}

double regret_lower_bound(const TheoryParams& params, double t) {
  check_params(params);
  if (!(t >= 1.0)) throw InvalidArgument("regret_lower_bound requires t >= 1");
  return params.gap / (static_cast<double>(params.num_actions) * std::pow(t, params.exponent));
}

double optimal_exponent(const TheoryParams& params, double t_eval, std::span<const double> grid,
                        OutOfDomain out_of_domain) {
  if (grid.empty()) throw InvalidArgument("optimal_exponent: empty exponent grid");
  std::optional<double> best_p;
  double best_bound = std::numeric_limits<double>::infinity();
  std::string skipped;
  for (double p : grid) {
    TheoryParams candidate = params;
    candidate.exponent = p;
    double bound = 0.0;
    try {
      bound = regret_upper_bound(candidate, t_eval);
    } catch (const DomainError& e) {
      if (out_of_domain == OutOfDomain::kThrow) {
        throw DomainError("optimal_exponent: p=" + describe(p) + ": " + e.what());
      }
      skipped += (skipped.empty() ? "" : ", ") + describe(p);
      continue;
    }
    if (!best_p || bound < best_bound) {
      best_bound = bound;
      best_p = p;
    }
  }
  if (!best_p) {
    throw DomainError("optimal_exponent: no exponent in the grid has a valid bound at t=" +
                      describe(t_eval) + " (skipped p=" + skipped + ")");
  }
  return *best_p;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo)) throw InvalidArgument("log_grid requires 0 < lo <= hi");
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> grid(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

}  // namespace epsgreedy
