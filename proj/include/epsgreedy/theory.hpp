#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace epsgreedy {

/// Constants of the regret theorems. `constants` (C_i) and `min_sizes` (n_i)
/// describe the per-arm regressors and are supplied by the caller; C_0, C_0'
/// and t_0 are always derived from them on demand.
struct TheoryParams {
  std::size_t num_actions = 2;
  double exponent = 1.0;
  double gap = 1.0;
  std::vector<double> constants;
  std::vector<double> min_sizes;
  double max_gap = 0.0;

  double max_constant() const;
  /// 8 sqrt(2) max_i C_i.
  double c0() const;
  /// 8 sqrt(2 (1 - p)) max_i C_i.
  double c0_prime() const;
};

/// (1/K) sum_{l=1}^{t-1} l^-p by direct summation. Requires t >= 2.
double expected_exploration_pulls(std::int64_t t, std::size_t num_actions, double p);

/// ln(t) / (2K) for p = 1, t^(1-p) / (2 (1-p) K) for 0 < p < 1.
double lemma_threshold(double t, std::size_t num_actions, double p);

/// 1 - K exp(-3 ln(t) / (28 K)) for p = 1 and
/// 1 - K exp(-3 t^(1-p) / (28 (1-p) K)) for 0 < p < 1. Not clamped: small t
/// gives a negative (vacuous) value.
double lemma_probability_bound(double t, std::size_t num_actions, double p);

/// t_0 of the active branch: exp(2K max(e, max n_i)) for p = 1,
/// (2 (1-p) K max(e, max n_i))^(1/(1-p)) for p < 1.
double min_valid_t(const TheoryParams& params);

/// Upper edge of the regret sandwich at step t > t_0. For p = 1:
///   max_gap / t + K^1.5 C_0 / delta * sqrt((ln ln t - ln 2K) / ln t)
/// and for 0 < p < 1:
///   max_gap / t^p + K^1.5 C_0' / delta
///       * sqrt((ln t^(1-p) - ln(2 (1-p) K)) / t^(1-p)).
/// Throws DomainError outside the theorem's range.
double regret_upper_bound(const TheoryParams& params, double t);

/// delta / (K t^p).
double regret_lower_bound(const TheoryParams& params, double t);

enum class OutOfDomain { kThrow, kSkip };

/// Grid point minimizing regret_upper_bound at t_eval (lowest index on ties).
/// A grid point whose bound is undefined at t_eval (t_eval <= t_0, or a
/// nonpositive radicand) raises DomainError, or with kSkip is left out of
/// the comparison; kSkip still throws when no grid point remains.
double optimal_exponent(const TheoryParams& params, double t_eval, std::span<const double> grid,
                        OutOfDomain out_of_domain = OutOfDomain::kThrow);

/// n points evenly spaced in log t between lo and hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

}  // namespace epsgreedy
