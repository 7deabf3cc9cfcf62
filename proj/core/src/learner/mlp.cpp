#include "xpmarl/learner/mlp.hpp"

#include <cmath>

#include "xpmarl/errors.hpp"

namespace xpmarl {

std::size_t MlpArchitecture::num_parameters() const {
  std::size_t total = 0;
  std::size_t in = input_dim;
  for (std::size_t h : hidden) {
    total += h * in + h;
    in = h;
  }
  return total + output_dim * in + output_dim;
}

Mlp::Mlp(MlpArchitecture arch) : arch_(std::move(arch)) {
  if (arch_.output_dim == 0) throw ConfigError("network output dimension must be positive");
  std::size_t in = arch_.input_dim;
  std::size_t offset = 0;
  auto add_layer = [&](std::size_t out) {
    if (out == 0) throw ConfigError("hidden layer width must be positive");
    Layer layer{in, out, offset, offset + out * in};
    offset = layer.bias_offset + out;
    layers_.push_back(layer);
    in = out;
  };
  for (std::size_t h : arch_.hidden) add_layer(h);
  add_layer(arch_.output_dim);
  num_parameters_ = offset;
}

Eigen::VectorXd Mlp::initial_parameters(Rng& rng, double output_gain) const {
  Eigen::VectorXd params = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_parameters_));
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    const double gain = (l + 1 == layers_.size()) ? output_gain : 1.0;
    const double bound = layer.in > 0 ? gain / std::sqrt(static_cast<double>(layer.in)) : 0.0;
    for (std::size_t k = 0; k < layer.in * layer.out; ++k) {
      params[static_cast<Eigen::Index>(layer.weight_offset + k)] = bound * (2.0 * rng.uniform() - 1.0);
    }
  }
  return params;
}

Eigen::MatrixXd Mlp::forward(const Eigen::Ref<const Eigen::VectorXd>& params,
                             const Eigen::Ref<const Eigen::MatrixXd>& inputs) const {
  Cache cache;
  return forward(params, inputs, cache);
}

Eigen::MatrixXd Mlp::forward(const Eigen::Ref<const Eigen::VectorXd>& params,
                             const Eigen::Ref<const Eigen::MatrixXd>& inputs, Cache& cache) const {
  if (static_cast<std::size_t>(inputs.rows()) != arch_.input_dim) {
    throw InvalidArgument("network expects input width " + std::to_string(arch_.input_dim) + ", got " +
                          std::to_string(inputs.rows()));
  }
  if (static_cast<std::size_t>(params.size()) != num_parameters_) {
    throw InvalidArgument("parameter vector has the wrong size");
  }
  cache.activations.clear();
  cache.activations.reserve(layers_.size());
  cache.activations.emplace_back(inputs);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    const auto in = static_cast<Eigen::Index>(layer.in);
    const auto out = static_cast<Eigen::Index>(layer.out);
    Eigen::Map<const Eigen::MatrixXd> w(params.data() + layer.weight_offset, out, in);
    Eigen::Map<const Eigen::VectorXd> b(params.data() + layer.bias_offset, out);
    Eigen::MatrixXd z = w * cache.activations.back();
    z.colwise() += b;
    if (l + 1 == layers_.size()) return z;
    if (arch_.activation == Activation::Tanh) {
      // Eigen's tanh is scalar for doubles; the exp form vectorizes and saturates cleanly.
      z = (1.0 - 2.0 / ((2.0 * z.array()).exp() + 1.0)).matrix();
    }
    cache.activations.push_back(std::move(z));
  }
  return {};  // unreachable: there is always an output layer
}

void Mlp::backward(const Eigen::Ref<const Eigen::VectorXd>& params, const Cache& cache,
                   const Eigen::Ref<const Eigen::MatrixXd>& grad_output,
                   Eigen::Ref<Eigen::VectorXd> grad) const {
  Eigen::MatrixXd delta = grad_output;  // dL/dz of the current layer
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Layer& layer = layers_[l];
    const auto in = static_cast<Eigen::Index>(layer.in);
    const auto out = static_cast<Eigen::Index>(layer.out);
    const Eigen::MatrixXd& a_in = cache.activations[l];
    Eigen::Map<Eigen::MatrixXd> gw(grad.data() + layer.weight_offset, out, in);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + layer.bias_offset, out);
    gw.noalias() += delta * a_in.transpose();
    gb += delta.rowwise().sum();
    if (l == 0) break;
    Eigen::Map<const Eigen::MatrixXd> w(params.data() + layer.weight_offset, out, in);
    Eigen::MatrixXd upstream = w.transpose() * delta;
    if (arch_.activation == Activation::Tanh) {
      upstream.array() *= 1.0 - a_in.array().square();
    }
    delta = std::move(upstream);
  }
}

}  // namespace xpmarl
