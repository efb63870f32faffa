#include "epsgreedy/environments.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "epsgreedy/core.hpp"
#include "epsgreedy/errors.hpp"

namespace epsgreedy {

Oracle Oracle::from_means(std::vector<double> means) {
  if (means.empty()) throw InvalidArgument("oracle needs at least one arm");
  Oracle oracle;
  oracle.optimal_arm = argmax_lowest(means);
  const double best = means[oracle.optimal_arm];
  oracle.gaps.reserve(means.size());
  for (double mu : means) oracle.gaps.push_back(std::max(0.0, best - mu));
  oracle.means = std::move(means);
  return oracle;
}

Environment::Environment(std::size_t context_dim, std::size_t num_actions, double noise_sigma)
    : context_dim_(context_dim), num_actions_(num_actions), noise_sigma_(noise_sigma) {
  if (num_actions < 2) throw InvalidArgument("environment needs at least two arms");
  if (context_dim < 1) throw InvalidArgument("environment needs a nonempty context");
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");
}

double Environment::draw_reward(const Oracle& oracle, std::size_t arm, Rng& noise) const {
  if (arm >= num_actions_ || arm >= oracle.means.size()) {
    throw InvalidArgument("draw_reward: arm " + std::to_string(arm) + " out of range");
  }
  const double mean = oracle.means[arm];
  if (noise_sigma_ == 0.0) return mean;
  return mean + noise_sigma_ * noise.normal();
}

// CodebookEnv

CodebookEnv::CodebookEnv(std::size_t num_actions, double noise_sigma, Layout layout)
    : Environment(num_actions * kCodeDim, num_actions, noise_sigma) {
  std::array<bool, kDigits> seen{};
  for (std::size_t k = 0; k < kDigits; ++k) {
    const int d = layout[k];
    if (d < 0 || d > 9 || seen[static_cast<std::size_t>(d)]) {
      throw InvalidArgument("codebook layout must be a permutation of 0..9");
    }
    seen[static_cast<std::size_t>(d)] = true;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) /
                             static_cast<double>(kDigits) + kAngleOffset;
    codebook_[static_cast<std::size_t>(d)] = {std::cos(angle), std::sin(angle)};
  }
}

std::array<double, CodebookEnv::kCodeDim> CodebookEnv::code(int digit) const {
  if (digit < 0 || digit > 9) throw InvalidArgument("digit out of range");
  return codebook_[static_cast<std::size_t>(digit)];
}

int CodebookEnv::decode(std::span<const double> code) const {
  if (code.size() != kCodeDim) throw InvalidArgument("code has wrong dimension");
  int best = 0;
  double best_dot = -1e300;
  for (std::size_t d = 0; d < kDigits; ++d) {
    const double dot = codebook_[d][0] * code[0] + codebook_[d][1] * code[1];
    if (dot > best_dot) {
      best_dot = dot;
      best = static_cast<int>(d);
    }
  }
  return best;
}

ContextSample CodebookEnv::context_for_digits(std::span<const int> digits) const {
  if (digits.size() != num_actions()) throw InvalidArgument("need one digit per arm");
  ContextSample sample;
  sample.context.reserve(context_dim());
  std::vector<double> means;
  means.reserve(digits.size());
  for (int d : digits) {
    const auto c = code(d);
    sample.context.insert(sample.context.end(), c.begin(), c.end());
    means.push_back(static_cast<double>(d));
  }
  sample.oracle = Oracle::from_means(std::move(means));
  return sample;
}

ContextSample CodebookEnv::sample_context(Rng& rng) const {
  std::vector<int> digits(num_actions());
  for (auto& d : digits) d = static_cast<int>(rng.index(kDigits));
  return context_for_digits(digits);
}

std::vector<double> CodebookEnv::mean_rewards(std::span<const double> context) const {
  if (context.size() != context_dim()) throw InvalidArgument("context has wrong dimension");
  std::vector<double> means(num_actions());
  for (std::size_t j = 0; j < num_actions(); ++j) {
    means[j] = decode(context.subspan(j * kCodeDim, kCodeDim));
  }
  return means;
}

// LinearEnv

namespace {

std::size_t checked_dim(const std::vector<std::vector<double>>& weights) {
  if (weights.empty() || weights.front().empty()) {
    throw InvalidArgument("LinearEnv needs nonempty weight vectors");
  }
  for (const auto& w : weights) {
    if (w.size() != weights.front().size()) {
      throw InvalidArgument("LinearEnv weight vectors differ in length");
    }
  }
  return weights.front().size();
}

std::vector<std::vector<double>> gaussian_weights(std::size_t m, std::size_t k, Rng& rng) {
  std::vector<std::vector<double>> weights(k, std::vector<double>(m));
  for (auto& w : weights) {
    for (auto& v : w) v = rng.normal();
  }
  return weights;
}

}  // namespace

LinearEnv::LinearEnv(std::vector<std::vector<double>> weights, double noise_sigma)
    : Environment(checked_dim(weights), weights.size(), noise_sigma),
      weights_(std::move(weights)) {}

LinearEnv::LinearEnv(std::size_t context_dim, std::size_t num_actions, double noise_sigma,
                     Rng& setup)
    : LinearEnv(gaussian_weights(context_dim, num_actions, setup), noise_sigma) {}

ContextSample LinearEnv::sample_context(Rng& rng) const {
  ContextSample sample;
  sample.context.resize(context_dim());
  for (auto& x : sample.context) x = rng.normal();
  sample.oracle = Oracle::from_means(mean_rewards(sample.context));
  return sample;
}

std::vector<double> LinearEnv::mean_rewards(std::span<const double> context) const {
  if (context.size() != context_dim()) throw InvalidArgument("context has wrong dimension");
  std::vector<double> means(num_actions(), 0.0);
  for (std::size_t j = 0; j < num_actions(); ++j) {
    for (std::size_t i = 0; i < context.size(); ++i) means[j] += weights_[j][i] * context[i];
  }
  return means;
}

// ConstantGapEnv

ConstantGapEnv::ConstantGapEnv(std::size_t num_actions, double gap, double noise_sigma)
    : Environment(num_actions, num_actions, noise_sigma), gap_(gap) {
  if (!(gap > 0.0)) throw InvalidArgument("ConstantGapEnv gap must be > 0");
}

ContextSample ConstantGapEnv::sample_context(Rng& rng) const {
  ContextSample sample;
  sample.context.assign(num_actions(), 0.0);
  sample.context[rng.index(num_actions())] = 1.0;
  sample.oracle = Oracle::from_means(mean_rewards(sample.context));
  return sample;
}

std::vector<double> ConstantGapEnv::mean_rewards(std::span<const double> context) const {
  if (context.size() != context_dim()) throw InvalidArgument("context has wrong dimension");
  std::vector<double> means(num_actions(), 0.0);
  means[argmax_lowest(context)] = gap_;
  return means;
}

// MnistEnv

MnistEnv::MnistEnv(const IdxImageSet& images, const IdxLabelSet& labels, std::size_t pool_factor,
                   std::size_t num_actions, double noise_sigma)
    : Environment(num_actions * (pool_factor == 0 ? 1 : (images.rows / pool_factor) *
                                                            (images.cols / pool_factor)),
                  num_actions, noise_sigma),
      features_per_image_(context_dim() / num_actions) {
  if (images.count != labels.count) {
    throw InvalidArgument("MnistEnv: " + std::to_string(images.count) + " images but " +
                          std::to_string(labels.count) + " labels");
  }
  pooled_.reserve(images.count);
  for (std::size_t i = 0; i < images.count; ++i) {
    pooled_.push_back(pool_image(images.image(i), images.rows, images.cols, pool_factor));
    by_digit_[labels.labels[i]].push_back(i);
  }
  for (std::size_t d = 0; d < by_digit_.size(); ++d) {
    if (by_digit_[d].empty()) {
      throw InvalidArgument("MnistEnv: no images with label " + std::to_string(d));
    }
  }
}

ContextSample MnistEnv::sample_context(Rng& rng) const {
  ContextSample sample;
  sample.context.reserve(context_dim());
  std::vector<double> means;
  means.reserve(num_actions());
  for (std::size_t j = 0; j < num_actions(); ++j) {
    const auto digit = rng.index(10);
    const auto& pool = by_digit_[digit];
    const auto& features = pooled_[pool[rng.index(pool.size())]];
    sample.context.insert(sample.context.end(), features.begin(), features.end());
    means.push_back(static_cast<double>(digit));
  }
  sample.oracle = Oracle::from_means(std::move(means));
  return sample;
}

std::vector<double> MnistEnv::mean_rewards(std::span<const double>) const {
  throw InvalidState("MnistEnv: digit labels cannot be recovered from pooled features");
}

double expected_optimal_mean(std::size_t num_actions) {
  const double k = static_cast<double>(num_actions);
  double mean = 0.0;
  for (int d = 0; d < 10; ++d) {
    const double below_or_equal = std::pow((d + 1) / 10.0, k);
    const double below = std::pow(d / 10.0, k);
    mean += d * (below_or_equal - below);
  }
  return mean;
}

}  // namespace epsgreedy
