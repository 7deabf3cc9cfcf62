#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "xpmarl/rng.hpp"

namespace xpmarl {

enum class Activation { Tanh, Identity };

struct MlpArchitecture {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden;
  std::size_t output_dim = 1;
  Activation activation = Activation::Tanh;

  std::size_t num_parameters() const;
  friend bool operator==(const MlpArchitecture&, const MlpArchitecture&) = default;
};

/// Fully connected network. Parameters live outside the object in one flat
/// vector laid out per layer as [W (col-major, out x in), b], so optimizers and
/// gradient checks can treat them as a single point.
class Mlp {
 public:
  explicit Mlp(MlpArchitecture arch);

  const MlpArchitecture& architecture() const { return arch_; }
  std::size_t num_parameters() const { return num_parameters_; }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights scaled by `output_gain`
  /// on the last layer; zero biases.
  Eigen::VectorXd initial_parameters(Rng& rng, double output_gain) const;

  struct Cache {
    std::vector<Eigen::MatrixXd> activations;  // input, then each hidden layer output
  };

  /// Columns of `inputs` are samples.
  Eigen::MatrixXd forward(const Eigen::Ref<const Eigen::VectorXd>& params,
                          const Eigen::Ref<const Eigen::MatrixXd>& inputs) const;
  Eigen::MatrixXd forward(const Eigen::Ref<const Eigen::VectorXd>& params,
                          const Eigen::Ref<const Eigen::MatrixXd>& inputs, Cache& cache) const;

  /// Adds dL/dparams to `grad` given dL/doutput.
  void backward(const Eigen::Ref<const Eigen::VectorXd>& params, const Cache& cache,
                const Eigen::Ref<const Eigen::MatrixXd>& grad_output,
                Eigen::Ref<Eigen::VectorXd> grad) const;

 private:
  struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::size_t weight_offset = 0;
    std::size_t bias_offset = 0;
  };

  MlpArchitecture arch_;
  std::vector<Layer> layers_;
  std::size_t num_parameters_ = 0;
};

}  // namespace xpmarl
