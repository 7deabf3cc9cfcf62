#include "xpmarl/harness/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "xpmarl/errors.hpp"

namespace xpmarl {

namespace {

using nlohmann::json;

json spec_json(const ActionSpec& spec) {
  if (spec.is_discrete()) return {{"discrete", spec.num_actions()}};
  return {{"low", spec.box().low}, {"high", spec.box().high}};
}

ActionSpec spec_from(const json& j) {
  if (j.contains("discrete")) return ActionSpec(DiscreteSpec{j.at("discrete").get<int>()});
  return ActionSpec(BoxSpec{j.at("low").get<std::vector<double>>(), j.at("high").get<std::vector<double>>()});
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void assign_params(Eigen::VectorXd& target, const json& j, const char* what) {
  const auto values = j.get<std::vector<double>>();
  if (values.size() != static_cast<std::size_t>(target.size())) {
    throw ConfigError(std::string("checkpoint ") + what + " has " + std::to_string(values.size()) +
                      " parameters, expected " + std::to_string(target.size()));
  }
  target = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json actor_json(const Actor& actor) {
  return {{"input_dim", actor.input_dim()},
          {"hidden", actor.hidden()},
          {"action_spec", spec_json(actor.action_spec())},
          {"parameters", to_std(actor.parameters())}};
}

Actor actor_from(const json& j) {
  Actor actor(j.at("input_dim").get<std::size_t>(), j.at("hidden").get<std::vector<std::size_t>>(),
              spec_from(j.at("action_spec")));
  assign_params(actor.parameters(), j.at("parameters"), "actor");
  return actor;
}

json critic_json(const Critic& critic) {
  return {{"input_dim", critic.input_dim()},
          {"hidden", critic.network().architecture().hidden},
          {"parameters", to_std(critic.parameters())},
          {"return_statistics",
           {critic.return_statistics().mean, critic.return_statistics().var, critic.return_statistics().count}}};
}

Critic critic_from(const json& j) {
  Critic critic(j.at("input_dim").get<std::size_t>(), j.at("hidden").get<std::vector<std::size_t>>());
  assign_params(critic.parameters(), j.at("parameters"), "critic");
  const auto stats = j.at("return_statistics").get<std::vector<double>>();
  if (stats.size() != 3) throw ConfigError("critic return_statistics must hold mean, var and count");
  critic.return_statistics() = ReturnStatistics{stats[0], stats[1], stats[2]};
  return critic;
}

}  // namespace

PolicySet Checkpoint::policies() const {
  if (!decision_actor) throw InvalidArgument("checkpoint has no decision actor");
  return PolicySet{priority_actor ? &*priority_actor : nullptr, &*decision_actor};
}

Checkpoint make_checkpoint(const BiStageTrainer& trainer, const ExperimentConfig& config, std::uint64_t seed,
                           std::size_t obs_dim, const Rng& rng) {
  Checkpoint cp;
  cp.config = config;
  cp.seed = seed;
  cp.config_hash = config_hash(config);
  cp.layout = trainer.slot_layout();
  cp.obs_dim = obs_dim;
  if (const auto* p = trainer.priority_instance()) {
    cp.priority_actor = p->actor();
    cp.priority_critic = p->critic();
  }
  cp.decision_actor = trainer.decision_instance().actor();
  cp.decision_critic = trainer.decision_instance().critic();
  cp.rng_state = rng.serialize();
  return cp;
}

std::string checkpoint_to_json(const Checkpoint& cp) {
  json doc;
  doc["checkpoint_version"] = kCheckpointVersion;
  doc["config"] = json::parse(config_to_json(cp.config));
  doc["seed"] = cp.seed;
  doc["config_hash"] = cp.config_hash;
  doc["layout"] = {{"k_obs", cp.layout.k_obs},
                   {"encoded_action_dim", cp.layout.encoded_action_dim},
                   {"slot_order", to_string(cp.layout.order)}};
  doc["obs_dim"] = cp.obs_dim;
  if (cp.priority_actor) doc["priority_actor"] = actor_json(*cp.priority_actor);
  if (cp.priority_critic) doc["priority_critic"] = critic_json(*cp.priority_critic);
  if (cp.decision_actor) doc["decision_actor"] = actor_json(*cp.decision_actor);
  if (cp.decision_critic) doc["decision_critic"] = critic_json(*cp.decision_critic);
  doc["rng_state"] = cp.rng_state;
  return doc.dump();
}

Checkpoint checkpoint_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("checkpoint_version").get<int>() != kCheckpointVersion) {
      throw ConfigError("unsupported checkpoint version " + doc.at("checkpoint_version").dump());
    }
    Checkpoint cp;
    cp.config = parse_config(doc.at("config").dump());
    cp.seed = doc.at("seed").get<std::uint64_t>();
    cp.config_hash = doc.at("config_hash").get<std::uint64_t>();
    if (cp.config_hash != config_hash(cp.config)) throw ConfigError("checkpoint config hash mismatch");
    cp.layout.k_obs = doc.at("layout").at("k_obs").get<int>();
    cp.layout.encoded_action_dim = doc.at("layout").at("encoded_action_dim").get<std::size_t>();
    cp.layout.order = parse_slot_order(doc.at("layout").at("slot_order").get<std::string>());
    cp.obs_dim = doc.at("obs_dim").get<std::size_t>();
    if (doc.contains("priority_actor")) cp.priority_actor = actor_from(doc.at("priority_actor"));
    if (doc.contains("priority_critic")) cp.priority_critic = critic_from(doc.at("priority_critic"));
    if (!doc.contains("decision_actor")) throw ConfigError("checkpoint lacks a decision actor");
    cp.decision_actor = actor_from(doc.at("decision_actor"));
    if (doc.contains("decision_critic")) cp.decision_critic = critic_from(doc.at("decision_critic"));
    cp.rng_state = doc.at("rng_state").get<std::string>();
    if (cp.wiring().learns_priorities() && !cp.priority_actor) {
      throw ConfigError("checkpoint variant learns priorities but has no priority actor");
    }
    return cp;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint " + path.string());
  out << checkpoint_to_json(checkpoint) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace xpmarl
