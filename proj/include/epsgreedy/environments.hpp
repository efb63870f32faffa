#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "epsgreedy/mnist.hpp"
#include "epsgreedy/random.hpp"

namespace epsgreedy {

/// Full-information view of one context: per-arm means mu_j(X), gaps
/// Delta_j(X) = max(0, mu_* - mu_j), and the lowest-index optimal arm.
struct Oracle {
  std::vector<double> means;
  std::vector<double> gaps;
  std::size_t optimal_arm = 0;

  double optimal_mean() const { return means.at(optimal_arm); }

  static Oracle from_means(std::vector<double> means);
};

struct ContextSample {
  std::vector<double> context;
  Oracle oracle;
};

/// i.i.d. context generator with Gaussian reward noise. Implementations are
/// immutable after construction; all randomness comes from the caller's
/// streams.
class Environment {
 public:
  Environment(std::size_t context_dim, std::size_t num_actions, double noise_sigma);
  virtual ~Environment() = default;

  virtual std::string_view name() const = 0;
  /// Uniform lower bound on the gap of every suboptimal arm, when one exists.
  virtual std::optional<double> min_gap() const = 0;
  virtual ContextSample sample_context(Rng& rng) const = 0;
  /// mu_1(X), ..., mu_K(X) recomputed from the context alone.
  virtual std::vector<double> mean_rewards(std::span<const double> context) const = 0;

  /// mu_arm + N(0, sigma^2). Throws InvalidArgument for an out-of-range arm.
  double draw_reward(const Oracle& oracle, std::size_t arm, Rng& noise) const;

  std::size_t context_dim() const noexcept { return context_dim_; }
  std::size_t num_actions() const noexcept { return num_actions_; }
  double noise_sigma() const noexcept { return noise_sigma_; }

 private:
  std::size_t context_dim_;
  std::size_t num_actions_;
  double noise_sigma_;
};

/// Pick-the-largest-digit task with each digit encoded as a point on the unit
/// circle. No affine map of a code reproduces the digit value; a nonlinear
/// model can decode it exactly. The layout sets which digit sits where.
class CodebookEnv final : public Environment {
 public:
  static constexpr std::size_t kDigits = 10;
  static constexpr std::size_t kCodeDim = 2;
  static constexpr double kAngleOffset = 0.1;
  using Layout = std::array<int, kDigits>;
  /// Digit placed at each position k of the circle, angle 2 pi k / 10 + offset.
  static constexpr Layout kDefaultLayout{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};

  CodebookEnv(std::size_t num_actions, double noise_sigma, Layout layout = kDefaultLayout);

  std::string_view name() const override { return "codebook"; }
  std::optional<double> min_gap() const override { return 1.0; }
  ContextSample sample_context(Rng& rng) const override;
  std::vector<double> mean_rewards(std::span<const double> context) const override;

  /// Context and oracle for a fixed digit assignment, one digit per arm.
  ContextSample context_for_digits(std::span<const int> digits) const;
  /// Unit-norm code of digit d.
  std::array<double, kCodeDim> code(int digit) const;
  int decode(std::span<const double> code) const;

 private:
  std::array<std::array<double, kCodeDim>, kDigits> codebook_{};
};

/// mu_j(X) = theta_j . X with X standard Gaussian.
class LinearEnv final : public Environment {
 public:
  LinearEnv(std::vector<std::vector<double>> weights, double noise_sigma);
  /// Draws theta_j ~ N(0, I_m) from `setup`.
  LinearEnv(std::size_t context_dim, std::size_t num_actions, double noise_sigma, Rng& setup);

  std::string_view name() const override { return "linear"; }
  std::optional<double> min_gap() const override { return std::nullopt; }
  ContextSample sample_context(Rng& rng) const override;
  std::vector<double> mean_rewards(std::span<const double> context) const override;

  const std::vector<std::vector<double>>& weights() const noexcept { return weights_; }

 private:
  std::vector<std::vector<double>> weights_;
};

/// One uniformly chosen arm pays `gap`, all others pay 0; the context is the
/// one-hot indicator of the paying arm. Every context has a suboptimal arm
/// and every suboptimal gap equals `gap` exactly.
class ConstantGapEnv final : public Environment {
 public:
  ConstantGapEnv(std::size_t num_actions, double gap, double noise_sigma);

  std::string_view name() const override { return "gap"; }
  std::optional<double> min_gap() const override { return gap_; }
  ContextSample sample_context(Rng& rng) const override;
  std::vector<double> mean_rewards(std::span<const double> context) const override;

 private:
  double gap_;
};

/// Pick-the-largest-digit task over pooled MNIST images. Each slot's digit is
/// uniform on 0..9 and the image is drawn uniformly (with replacement) among
/// images with that label.
class MnistEnv final : public Environment {
 public:
  MnistEnv(const IdxImageSet& images, const IdxLabelSet& labels, std::size_t pool_factor,
           std::size_t num_actions, double noise_sigma);

  std::string_view name() const override { return "mnist"; }
  std::optional<double> min_gap() const override { return 1.0; }
  ContextSample sample_context(Rng& rng) const override;
  /// Labels are not recoverable from pooled pixels; always throws InvalidState.
  std::vector<double> mean_rewards(std::span<const double> context) const override;

  std::size_t features_per_image() const noexcept { return features_per_image_; }
  std::size_t pool_size(int digit) const { return by_digit_.at(static_cast<std::size_t>(digit)).size(); }

 private:
  std::size_t features_per_image_;
  std::vector<std::vector<double>> pooled_;
  std::array<std::vector<std::size_t>, 10> by_digit_;
};

/// E[max of K i.i.d. uniform digits on {0..9}] by exact summation over the
/// distribution of the maximum.
double expected_optimal_mean(std::size_t num_actions);

}  // namespace epsgreedy
