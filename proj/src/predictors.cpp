#include "epsgreedy/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "epsgreedy/errors.hpp"

namespace epsgreedy {

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> x) {
  return {x.data(), static_cast<Eigen::Index>(x.size())};
}

void check_dims(const std::vector<std::size_t>& dims) {
  if (dims.size() < 2) throw InvalidArgument("MlpModel needs input and output dimensions");
  if (dims.back() != 1) throw InvalidArgument("MlpModel output dimension must be 1");
  for (auto d : dims) {
    if (d == 0) throw InvalidArgument("MlpModel layer widths must be positive");
  }
}

}  // namespace

// MlpModel

MlpModel::MlpModel(std::vector<std::size_t> dims, MlpTraining training)
    : dims_(std::move(dims)), training_(training) {
  check_dims(dims_);
  layers_.reserve(dims_.size() - 1);
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(dims_[l]);
    const auto out = static_cast<Eigen::Index>(dims_[l + 1]);
    layers_.push_back({Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
  }
}

MlpModel MlpModel::initialized(std::size_t input_dim, std::span<const std::size_t> hidden,
                               MlpTraining training, Rng& rng) {
  std::vector<std::size_t> dims{input_dim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(1);
  MlpModel model(std::move(dims), training);
  for (auto& layer : model.layers_) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layer.weights.rows() + layer.weights.cols()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        layer.weights(r, c) = dist(rng.engine());
      }
    }
  }
  return model;
}

double MlpModel::predict(std::span<const double> x) const {
  if (x.size() != input_dim()) {
    throw InvalidArgument("mlp predict: input has " + std::to_string(x.size()) +
                          " features, model expects " + std::to_string(input_dim()));
  }
  Eigen::VectorXd a = as_vector(x);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::VectorXd z = layers_[l].weights * a + layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a(0);
}

Eigen::VectorXd MlpModel::predict_batch(const Eigen::MatrixXd& inputs) const {
  if (static_cast<std::size_t>(inputs.cols()) != input_dim()) {
    throw InvalidArgument("mlp predict_batch: input dimension mismatch");
  }
  Eigen::MatrixXd a = inputs.transpose();
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = (layers_[l].weights * a).colwise() + layers_[l].bias;
    if (l + 1 < layers_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a.row(0).transpose();
}

MlpGradient MlpModel::gradient(const Eigen::MatrixXd& inputs,
                               const Eigen::VectorXd& targets) const {
  if (targets.size() == 0) throw InvalidArgument("mlp gradient: empty batch");
  if (inputs.rows() != targets.size()) throw InvalidArgument("mlp gradient: batch size mismatch");
  if (static_cast<std::size_t>(inputs.cols()) != input_dim()) {
    throw InvalidArgument("mlp gradient: input dimension mismatch");
  }
  const auto n = static_cast<double>(targets.size());
  const std::size_t depth = layers_.size();

  // activations[l] is the input to layer l; pre[l] its pre-activation output.
  std::vector<Eigen::MatrixXd> activations(depth + 1);
  std::vector<Eigen::MatrixXd> pre(depth);
  activations[0] = inputs.transpose();
  for (std::size_t l = 0; l < depth; ++l) {
    pre[l] = (layers_[l].weights * activations[l]).colwise() + layers_[l].bias;
    activations[l + 1] = l + 1 < depth ? pre[l].cwiseMax(0.0) : pre[l];
  }

  MlpGradient grad(depth);
  Eigen::MatrixXd delta = (2.0 / n) * (activations[depth].row(0) - targets.transpose());
  for (std::size_t l = depth; l-- > 0;) {
    grad[l].weights = delta * activations[l].transpose();
    grad[l].bias = delta.rowwise().sum();
    if (l > 0) {
      delta = (layers_[l].weights.transpose() * delta)
                  .cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return grad;
}

double MlpModel::mse(const TrainingSet& data) const {
  if (data.empty()) throw InvalidArgument("mse of empty set");
  return (predict_batch(data.inputs) - data.targets).squaredNorm() /
         static_cast<double>(data.size());
}

void MlpModel::apply_gradient(const MlpGradient& gradient, double learning_rate) {
  if (gradient.size() != layers_.size()) throw InvalidArgument("gradient shape mismatch");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    layers_[l].weights -= learning_rate * gradient[l].weights;
    layers_[l].bias -= learning_rate * gradient[l].bias;
  }
}

void MlpModel::fit(const TrainingSet& data, Rng& rng) {
  fit(data, training_.epochs, training_.learning_rate, rng);
}

void MlpModel::fit(const TrainingSet& data, std::int64_t epochs, double learning_rate, Rng& rng) {
  if (data.empty() || epochs <= 0) return;
  if (static_cast<std::size_t>(data.inputs.cols()) != input_dim()) {
    throw InvalidArgument("mlp fit: input dimension mismatch");
  }
  if (!(learning_rate > 0.0)) throw InvalidArgument("mlp fit: learning rate must be > 0");
  const std::size_t n = data.size();
  const std::size_t batch = std::min(std::max<std::size_t>(training_.batch_size, 1), n);
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Eigen::MatrixXd batch_inputs;
  Eigen::VectorXd batch_targets;

  for (std::int64_t epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      batch_inputs.resize(static_cast<Eigen::Index>(len), data.inputs.cols());
      batch_targets.resize(static_cast<Eigen::Index>(len));
      for (std::size_t i = 0; i < len; ++i) {
        const auto src = order[start + i];
        batch_inputs.row(static_cast<Eigen::Index>(i)) = data.inputs.row(src);
        batch_targets(static_cast<Eigen::Index>(i)) = data.targets(src);
      }
      apply_gradient(gradient(batch_inputs, batch_targets), learning_rate);
    }
    if (!all_finite()) {
      throw TrainingDiverged("mlp fit: non-finite parameters after epoch " +
                             std::to_string(epoch + 1));
    }
  }
}

std::size_t MlpModel::parameter_count() const {
  std::size_t count = 0;
  for (const auto& layer : layers_) {
    count += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
  }
  return count;
}

std::vector<double> MlpModel::parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) flat.push_back(layer.weights(r, c));
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) flat.push_back(layer.bias(r));
  }
  return flat;
}

void MlpModel::set_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw InvalidArgument("set_parameters: expected " + std::to_string(parameter_count()) +
                          " values, got " + std::to_string(values.size()));
  }
  std::size_t k = 0;
  for (auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = values[k++];
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = values[k++];
  }
}

bool MlpModel::all_finite() const {
  return std::all_of(layers_.begin(), layers_.end(), [](const DenseLayer& layer) {
    return layer.weights.allFinite() && layer.bias.allFinite();
  });
}

std::vector<double> MlpModel::serialize() const {
  std::vector<double> flat{static_cast<double>(dims_.size())};
  for (auto d : dims_) flat.push_back(static_cast<double>(d));
  const auto params = parameters();
  flat.insert(flat.end(), params.begin(), params.end());
  return flat;
}

MlpModel MlpModel::deserialize(std::span<const double> flat, MlpTraining training) {
  if (flat.empty()) throw InvalidArgument("deserialize: empty buffer");
  const auto count = static_cast<std::size_t>(flat[0]);
  if (count < 2 || flat.size() < 1 + count) throw InvalidArgument("deserialize: bad shape header");
  std::vector<std::size_t> dims;
  for (std::size_t i = 0; i < count; ++i) dims.push_back(static_cast<std::size_t>(flat[1 + i]));
  MlpModel model(std::move(dims), training);
  model.set_parameters(flat.subspan(1 + count));
  return model;
}

// LinearModel

LinearModel::LinearModel(std::size_t input_dim, double ridge)
    : weights_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(input_dim))), ridge_(ridge) {
  if (input_dim == 0) throw InvalidArgument("LinearModel needs a positive dimension");
  if (!(ridge >= 0.0)) throw InvalidArgument("LinearModel ridge must be >= 0");
}

double LinearModel::predict(std::span<const double> x) const {
  if (x.size() != input_dim()) throw InvalidArgument("linear predict: dimension mismatch");
  return weights_.dot(as_vector(x));
}

void LinearModel::fit(const TrainingSet& data, Rng&) {
  if (data.empty()) return;
  weights_ = linear_fit(data, ridge_).weights();
}

void LinearModel::fit_moments(const Eigen::MatrixXd& gram, const Eigen::VectorXd& moment) {
  const auto m = weights_.size();
  if (gram.rows() != m || gram.cols() != m || moment.size() != m) {
    throw InvalidArgument("fit_moments: dimension mismatch");
  }
  if (ridge_ > 0.0) {
    Eigen::MatrixXd regularized = gram;
    regularized.diagonal().array() += ridge_;
    weights_ = regularized.ldlt().solve(moment);
  } else {
    weights_ = gram.completeOrthogonalDecomposition().solve(moment);
  }
}

void LinearModel::set_weights(Eigen::VectorXd weights) {
  if (weights.size() != weights_.size()) throw InvalidArgument("set_weights: dimension mismatch");
  weights_ = std::move(weights);
}

std::vector<double> LinearModel::serialize() const {
  std::vector<double> flat{static_cast<double>(weights_.size())};
  flat.insert(flat.end(), weights_.data(), weights_.data() + weights_.size());
  return flat;
}

LinearModel linear_fit(const TrainingSet& data, double ridge) {
  const auto m = static_cast<std::size_t>(data.inputs.cols());
  if (m == 0) throw InvalidArgument("linear_fit: zero-dimensional inputs");
  LinearModel model(m, ridge);
  if (data.empty()) return model;
  if (data.inputs.rows() != data.targets.size()) {
    throw InvalidArgument("linear_fit: inputs and targets differ in length");
  }
  if (!data.inputs.allFinite() || !data.targets.allFinite()) {
    throw InvalidArgument("linear_fit: non-finite training data");
  }
  if (ridge == 0.0) {
    model.set_weights(data.inputs.completeOrthogonalDecomposition().solve(data.targets));
  } else {
    model.fit_moments(data.inputs.transpose() * data.inputs, data.inputs.transpose() * data.targets);
  }
  return model;
}

}  // namespace epsgreedy
