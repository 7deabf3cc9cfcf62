#include "xpmarl/learner/mappo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "xpmarl/errors.hpp"
#include "xpmarl/learner/gae.hpp"

namespace xpmarl {

ActorLoss actor_loss(const Actor& actor, const Eigen::VectorXd& params, const ActorBatch& batch,
                     double clip, double entropy_coef, Eigen::VectorXd* grad) {
  const Actor::BatchEval eval = actor.evaluate(params, batch.inputs, batch.raw);
  const Eigen::Index n = batch.inputs.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  ActorLoss loss;
  Eigen::VectorXd dlogp = Eigen::VectorXd::Zero(n);
  long clipped = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double log_ratio = eval.log_probs[k] - batch.old_log_probs[k];
    const double ratio = std::exp(log_ratio);
    const double adv = batch.advantages[k];
    const double unclipped = ratio * adv;
    const double clipped_ratio = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
    const double clipped_obj = clipped_ratio * adv;
    if (std::abs(ratio - 1.0) > clip) ++clipped;
    loss.policy_loss -= std::min(unclipped, clipped_obj) * inv_n;
    loss.approx_kl += ((ratio - 1.0) - log_ratio) * inv_n;
    // Zero gradient once the clipped branch is the active minimum.
    if (unclipped <= clipped_obj) {
      dlogp[k] = -ratio * adv * inv_n;
    }
  }
  loss.entropy = eval.entropies.mean();
  loss.clip_fraction = static_cast<double>(clipped) * inv_n;
  loss.total = loss.policy_loss - entropy_coef * loss.entropy;
  if (grad != nullptr) {
    const Eigen::VectorXd dentropy = Eigen::VectorXd::Constant(n, -entropy_coef * inv_n);
    actor.backward(params, eval, batch.raw, dlogp, dentropy, *grad);
  }
  return loss;
}

double critic_loss(const Critic& critic, const Eigen::VectorXd& params, const CriticBatch& batch,
                   double clip, double value_coef, Eigen::VectorXd* grad) {
  Mlp::Cache cache;
  const Eigen::MatrixXd values = critic.network().forward(params, batch.inputs, cache);
  const Eigen::Index n = batch.inputs.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  Eigen::MatrixXd dvalues = Eigen::MatrixXd::Zero(1, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double v = values(0, k);
    const double old = batch.old_values[k];
    const double ret = batch.returns[k];
    const double v_clipped = old + std::clamp(v - old, -clip, clip);
    const double e1 = (v - ret) * (v - ret);
    const double e2 = (v_clipped - ret) * (v_clipped - ret);
    loss += 0.5 * value_coef * std::max(e1, e2) * inv_n;
    if (e1 >= e2) {
      dvalues(0, k) = value_coef * (v - ret) * inv_n;
    } else if (std::abs(v - old) < clip) {
      dvalues(0, k) = value_coef * (v_clipped - ret) * inv_n;
    }
  }
  if (grad != nullptr) critic.network().backward(params, cache, dvalues, *grad);
  return loss;
}

std::vector<double> RolloutBuffer::rewards() const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.team_reward);
  return out;
}

MappoInstance::MappoInstance(int num_agents, std::size_t actor_input_dim, ActionSpec action_spec,
                             PpoHyperparameters hp, Rng& init_rng)
    : num_agents_(num_agents),
      hp_(std::move(hp)),
      actor_(actor_input_dim, hp_.hidden, std::move(action_spec)),
      critic_(actor_input_dim * static_cast<std::size_t>(num_agents), hp_.hidden),
      actor_opt_(0, hp_.learning_rate),
      critic_opt_(0, hp_.learning_rate) {
  if (num_agents < 2) throw ConfigError("a learning instance needs more than one agent");
  actor_.initialize(init_rng, hp_.initial_log_std);
  critic_.initialize(init_rng);
  actor_opt_ = Adam(actor_.parameters().size(), hp_.learning_rate);
  critic_opt_ = Adam(critic_.parameters().size(), hp_.learning_rate);
}

double MappoInstance::critic_value(const JointObservation& actor_inputs) const {
  const double v = critic_.value(concatenate(actor_inputs));
  return hp_.value_normalization ? critic_.return_statistics().denormalize(v) : v;
}

namespace {

[[noreturn]] void diverged(const char* what, const PpoDiagnostics& d, int epoch, std::size_t batch_start) {
  std::ostringstream msg;
  msg << "non-finite " << what << " during PPO update (epoch " << epoch << ", minibatch at " << batch_start
      << "): policy_loss=" << d.policy_loss << " value_loss=" << d.value_loss << " entropy=" << d.entropy
      << " approx_kl=" << d.approx_kl << " samples=" << d.num_samples;
  throw NumericalDivergence(msg.str());
}

}  // namespace

PpoDiagnostics MappoInstance::update(Rng& shuffle_rng) {
  const auto& records = buffer_.records();
  if (records.empty()) throw InvalidArgument("PPO update on an empty buffer");
  const std::size_t steps = records.size();
  const auto n_agents = static_cast<std::size_t>(num_agents_);

  std::vector<double> rewards(steps), values(steps);
  std::vector<bool> dones(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    rewards[t] = records[t].team_reward;
    values[t] = records[t].value_estimates.at(0);
    dones[t] = records[t].done;
  }
  const AdvantageEstimate adv = compute_gae(rewards, values, dones, hp_.gamma, hp_.gae_lambda,
                                            hp_.normalize_advantages);

  // Critic targets live in normalized units; the stored estimates were
  // denormalized with the statistics current at collection time.
  std::vector<double> critic_returns = adv.returns;
  std::vector<double> critic_old = values;
  if (hp_.value_normalization) {
    auto& stats = critic_.return_statistics();
    stats.update(adv.returns);
    for (std::size_t t = 0; t < steps; ++t) {
      critic_returns[t] = stats.normalize(adv.returns[t]);
      critic_old[t] = stats.normalize(values[t]);
    }
  }

  const auto in_dim = static_cast<Eigen::Index>(actor_.input_dim());
  const auto raw_dim = static_cast<Eigen::Index>(actor_.raw_dim());
  const auto samples = static_cast<Eigen::Index>(steps * n_agents);
  ActorBatch all_actor;
  all_actor.inputs.resize(in_dim, samples);
  all_actor.raw.resize(raw_dim, samples);
  all_actor.old_log_probs.resize(samples);
  all_actor.advantages.resize(samples);
  CriticBatch all_critic;
  all_critic.inputs.resize(in_dim * static_cast<Eigen::Index>(n_agents), static_cast<Eigen::Index>(steps));
  all_critic.old_values.resize(static_cast<Eigen::Index>(steps));
  all_critic.returns.resize(static_cast<Eigen::Index>(steps));
  for (std::size_t t = 0; t < steps; ++t) {
    const auto& rec = records[t];
    for (std::size_t i = 0; i < n_agents; ++i) {
      const auto col = static_cast<Eigen::Index>(t * n_agents + i);
      const auto& obs = rec.obs.per_agent.at(i);
      if (static_cast<Eigen::Index>(obs.size()) != in_dim) throw InvalidArgument("buffered input has the wrong width");
      for (Eigen::Index r = 0; r < in_dim; ++r) {
        all_actor.inputs(r, col) = obs[static_cast<std::size_t>(r)];
        all_critic.inputs(static_cast<Eigen::Index>(i) * in_dim + r, static_cast<Eigen::Index>(t)) =
            obs[static_cast<std::size_t>(r)];
      }
      for (Eigen::Index r = 0; r < raw_dim; ++r) all_actor.raw(r, col) = rec.actions.at(i).raw[static_cast<std::size_t>(r)];
      all_actor.old_log_probs[col] = rec.log_probs.at(i);
      all_actor.advantages[col] = adv.advantages[t];
    }
    all_critic.old_values[static_cast<Eigen::Index>(t)] = critic_old[t];
    all_critic.returns[static_cast<Eigen::Index>(t)] = critic_returns[t];
  }

  const auto mb = static_cast<std::size_t>(std::max(1, hp_.minibatch_size));
  std::vector<Eigen::Index> actor_idx(static_cast<std::size_t>(samples));
  std::iota(actor_idx.begin(), actor_idx.end(), 0);
  std::vector<Eigen::Index> critic_idx(steps);
  std::iota(critic_idx.begin(), critic_idx.end(), 0);
  const std::size_t num_minibatches = (actor_idx.size() + mb - 1) / mb;
  const std::size_t critic_mb = std::max<std::size_t>(1, (steps + num_minibatches - 1) / num_minibatches);

  PpoDiagnostics diag;
  diag.num_samples = actor_idx.size();
  double count = 0.0;
  double clip_sum = 0.0;
  bool first = true;
  for (int epoch = 0; epoch < hp_.epochs; ++epoch) {
    std::shuffle(actor_idx.begin(), actor_idx.end(), shuffle_rng.engine());
    std::shuffle(critic_idx.begin(), critic_idx.end(), shuffle_rng.engine());
    for (std::size_t b = 0; b < num_minibatches; ++b) {
      const std::size_t a_begin = b * mb;
      const std::size_t a_end = std::min(actor_idx.size(), a_begin + mb);
      const std::vector<Eigen::Index> a_cols(actor_idx.begin() + static_cast<std::ptrdiff_t>(a_begin),
                                             actor_idx.begin() + static_cast<std::ptrdiff_t>(a_end));
      ActorBatch batch;
      batch.inputs = all_actor.inputs(Eigen::all, a_cols);
      batch.raw = all_actor.raw(Eigen::all, a_cols);
      batch.old_log_probs = all_actor.old_log_probs(a_cols);
      batch.advantages = all_actor.advantages(a_cols);
      Eigen::VectorXd actor_grad = Eigen::VectorXd::Zero(actor_.parameters().size());
      const ActorLoss al = actor_loss(actor_, actor_.parameters(), batch, hp_.clip, hp_.entropy_coef, &actor_grad);
      if (!std::isfinite(al.total) || !actor_grad.allFinite()) {
        diag.policy_loss = al.policy_loss;
        diag.entropy = al.entropy;
        diverged("actor loss", diag, epoch, a_begin);
      }
      const double gnorm = clip_grad_norm(actor_grad, hp_.max_grad_norm);
      if (first) diag.policy_grad_norm = gnorm;
      actor_opt_.step(actor_.parameters(), actor_grad);

      const std::size_t c_begin = (b * critic_mb) % steps;
      const std::size_t c_end = std::min(steps, c_begin + critic_mb);
      const std::vector<Eigen::Index> c_cols(critic_idx.begin() + static_cast<std::ptrdiff_t>(c_begin),
                                             critic_idx.begin() + static_cast<std::ptrdiff_t>(c_end));
      CriticBatch cbatch;
      cbatch.inputs = all_critic.inputs(Eigen::all, c_cols);
      cbatch.old_values = all_critic.old_values(c_cols);
      cbatch.returns = all_critic.returns(c_cols);
      Eigen::VectorXd critic_grad = Eigen::VectorXd::Zero(critic_.parameters().size());
      const double vl = critic_loss(critic_, critic_.parameters(), cbatch, hp_.clip, hp_.value_coef, &critic_grad);
      if (!std::isfinite(vl) || !critic_grad.allFinite()) {
        diag.value_loss = vl;
        diverged("critic loss", diag, epoch, c_begin);
      }
      clip_grad_norm(critic_grad, hp_.max_grad_norm);
      critic_opt_.step(critic_.parameters(), critic_grad);

      diag.policy_loss += al.policy_loss;
      diag.value_loss += vl;
      diag.entropy += al.entropy;
      diag.approx_kl += al.approx_kl;
      clip_sum += al.clip_fraction;
      count += 1.0;
      first = false;
    }
  }
  if (count > 0.0) {
    diag.policy_loss /= count;
    diag.value_loss /= count;
    diag.entropy /= count;
    diag.approx_kl /= count;
    diag.clip_fraction = clip_sum / count;
  }
  if (!actor_.parameters().allFinite() || !critic_.parameters().allFinite()) {
    diverged("parameters", diag, hp_.epochs, 0);
  }
  diag.actor_hash = actor_.parameter_hash();
  buffer_.clear();
  return diag;
}

}  // namespace xpmarl
