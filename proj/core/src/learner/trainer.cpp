#include "xpmarl/learner/trainer.hpp"

#include "xpmarl/errors.hpp"

namespace xpmarl {

namespace {

const ActionSpec& priority_score_spec() {
  static const ActionSpec spec(BoxSpec{{-1.0}, {1.0}});
  return spec;
}

}  // namespace

BiStageTrainer::BiStageTrainer(const TeamEnv& env, TrainerOptions options)
    : options_(std::move(options)), num_agents_(env.num_agents()) {
  if (options_.k_obs < 1) throw ConfigError("k_obs must be at least 1");
  layout_ = SlotLayout{options_.k_obs, env.action_spec().encoded_dim(), options_.slot_order};
  Rng init = Rng(options_.seed).derive(1);
  if (options_.wiring.learns_priorities()) {
    PpoHyperparameters hp = options_.priority_hp;
    hp.rollout_steps = options_.decision_hp.rollout_steps;
    priority_ = std::make_unique<MappoInstance>(num_agents_, env.obs_dim(), priority_score_spec(), hp, init);
  }
  decision_ = std::make_unique<MappoInstance>(num_agents_, env.obs_dim() + layout_.width(),
                                              env.action_spec(), options_.decision_hp, init);
}

PolicySet BiStageTrainer::policies() const {
  return PolicySet{priority_ ? &priority_->actor() : nullptr, &decision_->actor()};
}

TrainingCurve BiStageTrainer::train(TeamEnv& env, const UpdateObserver& on_update,
                                    const RolloutObserver& on_rollout) {
  if (env.num_agents() != num_agents_) throw ConfigError("training environment changed its agent count");
  const Rng root(options_.seed);
  StepStreams streams(root.derive(2).seed());
  Rng shuffle = root.derive(4);
  const long rollout_steps = std::max(1, options_.decision_hp.rollout_steps);

  TrainingCurve curve;
  long total_steps = 0;
  long episode = 0;
  int iteration = 0;
  while (total_steps < options_.total_env_steps) {
    long collected = 0;
    // No episode starts once the budget is spent; a started one runs to its end.
    while (collected < rollout_steps && total_steps < options_.total_env_steps) {
      JointObservation obs = env.reset(root.derive(1'000'000 + static_cast<std::uint64_t>(episode)).seed());
      EpisodeRecord ep;
      ep.episode = episode;
      bool done = false;
      while (!done) {
        const ObservableSets obs_sets = env.observable_sets(options_.k_obs);
        const StepDecision step =
            decide_step(options_.wiring, obs, obs_sets, policies(), layout_, ActMode::Stochastic, streams);
        JointObservation decision_inputs = step.decision_inputs();
        const double decision_value = decision_->critic_value(decision_inputs);
        const double priority_value = priority_ ? priority_->critic_value(obs) : 0.0;

        StepResult result = env.step(step.decision.joint_action);
        done = result.done || ep.length + 1 >= env.max_episode_steps();

        TransitionRecord rec;
        rec.obs = std::move(decision_inputs);
        rec.actions = step.decision.samples;
        for (const auto& s : rec.actions) rec.log_probs.push_back(s.log_prob);
        rec.team_reward = result.team_reward;
        rec.done = done;
        rec.value_estimates.assign(static_cast<std::size_t>(num_agents_), decision_value);
        decision_->buffer().push(std::move(rec));

        if (priority_) {
          TransitionRecord prec;
          prec.obs = obs;
          prec.actions = step.priority->samples;
          for (const auto& s : prec.actions) prec.log_probs.push_back(s.log_prob);
          prec.team_reward = result.team_reward;
          prec.done = done;
          prec.value_estimates.assign(static_cast<std::size_t>(num_agents_), priority_value);
          priority_->buffer().push(std::move(prec));
        }

        ep.team_return += result.team_reward;
        ++ep.length;
        ++collected;
        ++total_steps;
        obs = std::move(result.observation);
      }
      ep.env_steps = total_steps;
      curve.episodes.push_back(ep);
      ++episode;
    }

    if (on_rollout) on_rollout(priority_ ? &priority_->buffer() : nullptr, decision_->buffer());
    UpdateRecord update;
    update.iteration = iteration++;
    update.env_steps = total_steps;
    if (priority_) update.priority = priority_->update(shuffle);
    update.decision = decision_->update(shuffle);
    curve.updates.push_back(update);
    if (on_update) on_update(update);
  }
  return curve;
}

}  // namespace xpmarl
