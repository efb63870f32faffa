#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "epsgreedy/random.hpp"

namespace epsgreedy {

/// Regression data S = {(X_l, R_l)}: one example per row of `inputs`.
struct TrainingSet {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd targets;

  std::size_t size() const noexcept { return static_cast<std::size_t>(targets.size()); }
  bool empty() const noexcept { return targets.size() == 0; }
};

/// Context -> predicted reward. One instance per arm.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::size_t input_dim() const = 0;
  virtual double predict(std::span<const double> x) const = 0;
  /// Updates the model from `data`. An empty set leaves the model unchanged.
  virtual void fit(const TrainingSet& data, Rng& rng) = 0;
};

struct MlpTraining {
  std::int64_t epochs = 16;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
};

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
};

/// Same shape as the model's layers.
using MlpGradient = std::vector<DenseLayer>;

/// Fully connected network with rectifier hidden layers and a linear scalar
/// output, trained by shuffled mini-batch gradient descent on mean squared
/// error. Training always continues from the current parameters.
class MlpModel final : public Predictor {
 public:
  /// dims = {m, h_1, ..., h_L, 1}; all parameters zero.
  explicit MlpModel(std::vector<std::size_t> dims, MlpTraining training = {});

  /// Glorot-uniform weights, zero biases.
  static MlpModel initialized(std::size_t input_dim, std::span<const std::size_t> hidden,
                              MlpTraining training, Rng& rng);

  std::size_t input_dim() const override { return dims_.front(); }
  double predict(std::span<const double> x) const override;
  void fit(const TrainingSet& data, Rng& rng) override;

  /// One prediction per row of `inputs`.
  Eigen::VectorXd predict_batch(const Eigen::MatrixXd& inputs) const;
  /// Gradient of (1/n) sum (predict(x_i) - y_i)^2 by backpropagation.
  MlpGradient gradient(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets) const;
  double mse(const TrainingSet& data) const;

  /// Throws TrainingDiverged if the loss or parameters stop being finite.
  void fit(const TrainingSet& data, std::int64_t epochs, double learning_rate, Rng& rng);
  void apply_gradient(const MlpGradient& gradient, double learning_rate);

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer>& layers() noexcept { return layers_; }
  const MlpTraining& training() const noexcept { return training_; }

  std::size_t parameter_count() const;
  /// Per layer: weights row-major, then bias.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> values);
  bool all_finite() const;

  /// {L+1, dims..., parameters...} as reals.
  std::vector<double> serialize() const;
  static MlpModel deserialize(std::span<const double> flat, MlpTraining training = {});

 private:
  std::vector<std::size_t> dims_;
  std::vector<DenseLayer> layers_;
  MlpTraining training_;
};

/// Intercept-free least squares: prediction B . x.
class LinearModel final : public Predictor {
 public:
  explicit LinearModel(std::size_t input_dim, double ridge = 1e-8);

  std::size_t input_dim() const override { return static_cast<std::size_t>(weights_.size()); }
  double predict(std::span<const double> x) const override;
  void fit(const TrainingSet& data, Rng& rng) override;

  /// Solves (G + ridge I) B = m for G = X^T X, m = X^T R; with ridge 0 the
  /// minimum-norm solution.
  void fit_moments(const Eigen::MatrixXd& gram, const Eigen::VectorXd& moment);

  double ridge() const noexcept { return ridge_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  void set_weights(Eigen::VectorXd weights);

  /// {m, B...}.
  std::vector<double> serialize() const;

 private:
  Eigen::VectorXd weights_;
  double ridge_;
};

/// (X^T X + ridge I) B = X^T R; an empty set gives the zero model. With ridge
/// 0 and a rank-deficient design, the minimum-norm least-squares solution.
LinearModel linear_fit(const TrainingSet& data, double ridge);

}  // namespace epsgreedy
