#include "xpmarl/learner/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "xpmarl/errors.hpp"

namespace xpmarl {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

/// log(1 - tanh(u)^2), stable for large |u|.
double log_tanh_derivative(double u) { return 2.0 * (std::numbers::ln2 - u - softplus(-2.0 * u)); }

std::size_t head_width(const ActionSpec& spec) {
  return spec.is_discrete() ? static_cast<std::size_t>(spec.num_actions()) : spec.action_dim();
}

Eigen::Map<const Eigen::VectorXd> as_column(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace

std::uint64_t hash_parameters(const Eigen::VectorXd& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    std::uint64_t bits = 0;
    const double v = params[i];
    std::memcpy(&bits, &v, sizeof bits);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (bits >> (8 * byte)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

Vector concatenate(const JointObservation& inputs) {
  Vector out;
  for (const auto& v : inputs.per_agent) out.insert(out.end(), v.begin(), v.end());
  return out;
}

Actor::Actor(std::size_t input_dim, std::vector<std::size_t> hidden, ActionSpec action_spec)
    : spec_(std::move(action_spec)),
      mlp_(MlpArchitecture{input_dim, std::move(hidden), head_width(spec_), Activation::Tanh}) {
  const std::size_t extra = spec_.is_discrete() ? 0 : spec_.action_dim();
  params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mlp_.num_parameters() + extra));
}

void Actor::initialize(Rng& rng, double initial_log_std) {
  params_.head(static_cast<Eigen::Index>(mlp_.num_parameters())) = mlp_.initial_parameters(rng, 0.01);
  if (!spec_.is_discrete()) {
    params_.tail(static_cast<Eigen::Index>(spec_.action_dim())).setConstant(initial_log_std);
  }
}

std::size_t Actor::raw_dim() const { return spec_.action_dim(); }

std::uint64_t Actor::parameter_hash() const { return hash_parameters(params_); }

Eigen::VectorXd Actor::clamped_log_std(const Eigen::Ref<const Eigen::VectorXd>& params) const {
  const auto d = static_cast<Eigen::Index>(spec_.action_dim());
  return params.tail(d).cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
}

Vector Actor::squash(std::span<const double> raw) const {
  const auto& box = spec_.box();
  Vector action(raw.size());
  for (std::size_t d = 0; d < raw.size(); ++d) {
    const double unit = 0.5 * (std::tanh(raw[d]) + 1.0);
    action[d] = std::clamp(box.low[d] + unit * (box.high[d] - box.low[d]), box.low[d], box.high[d]);
  }
  return action;
}

ActionSample Actor::act(std::span<const double> obs, ActMode mode, Rng& rng) const {
  const auto mlp_params = params_.head(static_cast<Eigen::Index>(mlp_.num_parameters()));
  const Eigen::VectorXd head = mlp_.forward(mlp_params, as_column(obs)).col(0);
  ActionSample sample;
  if (spec_.is_discrete()) {
    const double lse = std::log((head.array() - head.maxCoeff()).exp().sum()) + head.maxCoeff();
    Eigen::Index choice = 0;
    if (mode == ActMode::Mean) {
      head.maxCoeff(&choice);
    } else {
      const double u = rng.uniform();
      double cumulative = 0.0;
      choice = head.size() - 1;
      for (Eigen::Index k = 0; k < head.size(); ++k) {
        cumulative += std::exp(head[k] - lse);
        if (u < cumulative) {
          choice = k;
          break;
        }
      }
    }
    sample.action = {static_cast<double>(choice)};
    sample.raw = sample.action;
    sample.log_prob = head[choice] - lse;
    return sample;
  }
  const Eigen::VectorXd log_std = clamped_log_std(params_);
  sample.raw.resize(static_cast<std::size_t>(head.size()));
  for (Eigen::Index d = 0; d < head.size(); ++d) {
    const double eps = mode == ActMode::Mean ? 0.0 : rng.normal();
    sample.raw[static_cast<std::size_t>(d)] = head[d] + std::exp(log_std[d]) * eps;
  }
  sample.action = squash(sample.raw);
  sample.log_prob = log_prob(obs, sample.raw);
  return sample;
}

Vector Actor::mean_action(std::span<const double> obs) const {
  Rng unused(0);
  return act(obs, ActMode::Mean, unused).action;
}

double Actor::log_prob(std::span<const double> obs, std::span<const double> raw) const {
  const Eigen::Map<const Eigen::MatrixXd> raw_col(raw.data(), static_cast<Eigen::Index>(raw.size()), 1);
  return evaluate(params_, as_column(obs), raw_col).log_probs[0];
}

Actor::BatchEval Actor::evaluate(const Eigen::Ref<const Eigen::VectorXd>& params,
                                 const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                                 const Eigen::Ref<const Eigen::MatrixXd>& raw) const {
  if (static_cast<std::size_t>(raw.rows()) != raw_dim() || raw.cols() != inputs.cols()) {
    throw InvalidArgument("raw action batch has the wrong shape");
  }
  BatchEval eval;
  const auto n_mlp = static_cast<Eigen::Index>(mlp_.num_parameters());
  eval.head = mlp_.forward(params.head(n_mlp), inputs, eval.cache);
  const Eigen::Index batch = inputs.cols();
  eval.log_probs.resize(batch);
  eval.entropies.resize(batch);
  if (spec_.is_discrete()) {
    for (Eigen::Index k = 0; k < batch; ++k) {
      const auto z = eval.head.col(k);
      const double m = z.maxCoeff();
      const double lse = std::log((z.array() - m).exp().sum()) + m;
      const Eigen::ArrayXd logp = z.array() - lse;
      eval.log_probs[k] = logp[static_cast<Eigen::Index>(raw(0, k))];
      eval.entropies[k] = -(logp.exp() * logp).sum();
    }
    return eval;
  }
  const Eigen::VectorXd log_std = clamped_log_std(params);
  const auto& box = spec_.box();
  double log_scale = 0.0;
  for (std::size_t d = 0; d < box.low.size(); ++d) log_scale += std::log(0.5 * (box.high[d] - box.low[d]));
  const double entropy = (log_std.array() + 0.5 + kHalfLog2Pi).sum();
  for (Eigen::Index k = 0; k < batch; ++k) {
    double lp = -log_scale;
    for (Eigen::Index d = 0; d < log_std.size(); ++d) {
      const double z = (raw(d, k) - eval.head(d, k)) * std::exp(-log_std[d]);
      lp += -0.5 * z * z - log_std[d] - kHalfLog2Pi - log_tanh_derivative(raw(d, k));
    }
    eval.log_probs[k] = lp;
    eval.entropies[k] = entropy;
  }
  return eval;
}

void Actor::backward(const Eigen::Ref<const Eigen::VectorXd>& params, const BatchEval& eval,
                     const Eigen::Ref<const Eigen::MatrixXd>& raw, const Eigen::VectorXd& dlogp,
                     const Eigen::VectorXd& dentropy, Eigen::Ref<Eigen::VectorXd> grad) const {
  const auto n_mlp = static_cast<Eigen::Index>(mlp_.num_parameters());
  const Eigen::Index batch = eval.head.cols();
  Eigen::MatrixXd grad_head(eval.head.rows(), batch);
  if (spec_.is_discrete()) {
    for (Eigen::Index k = 0; k < batch; ++k) {
      const auto z = eval.head.col(k);
      const double m = z.maxCoeff();
      const double lse = std::log((z.array() - m).exp().sum()) + m;
      const Eigen::ArrayXd logp = z.array() - lse;
      const Eigen::ArrayXd p = logp.exp();
      Eigen::ArrayXd g = -dlogp[k] * p;
      g[static_cast<Eigen::Index>(raw(0, k))] += dlogp[k];
      g += dentropy[k] * (-p * (logp + eval.entropies[k]));
      grad_head.col(k) = g.matrix();
    }
  } else {
    const auto d_dim = static_cast<Eigen::Index>(spec_.action_dim());
    const Eigen::VectorXd log_std = clamped_log_std(params);
    const Eigen::VectorXd raw_log_std = params.tail(d_dim);
    Eigen::VectorXd grad_log_std = Eigen::VectorXd::Zero(d_dim);
    for (Eigen::Index k = 0; k < batch; ++k) {
      for (Eigen::Index d = 0; d < d_dim; ++d) {
        const double inv_var = std::exp(-2.0 * log_std[d]);
        const double diff = raw(d, k) - eval.head(d, k);
        grad_head(d, k) = dlogp[k] * diff * inv_var;
        grad_log_std[d] += dlogp[k] * (diff * diff * inv_var - 1.0) + dentropy[k];
      }
    }
    for (Eigen::Index d = 0; d < d_dim; ++d) {
      if (raw_log_std[d] > kLogStdMin && raw_log_std[d] < kLogStdMax) grad[n_mlp + d] += grad_log_std[d];
    }
  }
  mlp_.backward(params.head(n_mlp), eval.cache, grad_head, grad.head(n_mlp));
}

void ReturnStatistics::update(std::span<const double> batch) {
  if (batch.empty()) return;
  const auto n = static_cast<double>(batch.size());
  double b_mean = 0.0;
  for (double x : batch) b_mean += x;
  b_mean /= n;
  double b_var = 0.0;
  for (double x : batch) b_var += (x - b_mean) * (x - b_mean);
  b_var /= n;
  if (count == 0.0) {
    mean = b_mean;
    var = b_var;
    count = n;
    return;
  }
  const double total = count + n;
  const double delta = b_mean - mean;
  mean += delta * n / total;
  var = (var * count + b_var * n + delta * delta * count * n / total) / total;
  count = total;
}

double ReturnStatistics::std() const { return std::sqrt(std::max(var, 1e-8)); }

Critic::Critic(std::size_t input_dim, std::vector<std::size_t> hidden)
    : mlp_(MlpArchitecture{input_dim, std::move(hidden), 1, Activation::Tanh}),
      params_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mlp_.num_parameters()))) {}

void Critic::initialize(Rng& rng) { params_ = mlp_.initial_parameters(rng, 1.0); }

double Critic::value(std::span<const double> joint_input) const {
  return mlp_.forward(params_, as_column(joint_input))(0, 0);
}

}  // namespace xpmarl
