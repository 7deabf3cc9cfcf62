#include "xpmarl/harness/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "xpmarl/errors.hpp"

namespace xpmarl {

namespace {

using nlohmann::json;

template <typename T>
void read_opt(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void require_known_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

PpoHyperparameters parse_hp(const json& j, const std::string& where) {
  require_known_keys(j,
                     {"hidden", "learning_rate", "clip", "gamma", "gae_lambda", "epochs", "minibatch_size",
                      "entropy_coef", "value_coef", "max_grad_norm", "rollout_steps", "initial_log_std",
                      "normalize_advantages", "value_normalization"},
                     where);
  PpoHyperparameters hp;
  read_opt(j, "hidden", hp.hidden, where);
  read_opt(j, "learning_rate", hp.learning_rate, where);
  read_opt(j, "clip", hp.clip, where);
  read_opt(j, "gamma", hp.gamma, where);
  read_opt(j, "gae_lambda", hp.gae_lambda, where);
  read_opt(j, "epochs", hp.epochs, where);
  read_opt(j, "minibatch_size", hp.minibatch_size, where);
  read_opt(j, "entropy_coef", hp.entropy_coef, where);
  read_opt(j, "value_coef", hp.value_coef, where);
  read_opt(j, "max_grad_norm", hp.max_grad_norm, where);
  read_opt(j, "rollout_steps", hp.rollout_steps, where);
  read_opt(j, "initial_log_std", hp.initial_log_std, where);
  read_opt(j, "normalize_advantages", hp.normalize_advantages, where);
  read_opt(j, "value_normalization", hp.value_normalization, where);
  return hp;
}

void validate_hp(const PpoHyperparameters& hp, const std::string& where) {
  for (std::size_t h : hp.hidden) {
    if (h == 0) throw ConfigError(where + ".hidden has a zero-width layer");
  }
  if (!(hp.learning_rate > 0.0)) throw ConfigError(where + ".learning_rate must be positive");
  if (!(hp.clip > 0.0)) throw ConfigError(where + ".clip must be positive");
  if (!(hp.gamma >= 0.0 && hp.gamma <= 1.0)) throw ConfigError(where + ".gamma must lie in [0, 1]");
  if (!(hp.gae_lambda >= 0.0 && hp.gae_lambda <= 1.0)) throw ConfigError(where + ".gae_lambda must lie in [0, 1]");
  if (hp.epochs < 1) throw ConfigError(where + ".epochs must be at least 1");
  if (hp.minibatch_size < 1) throw ConfigError(where + ".minibatch_size must be at least 1");
  if (hp.rollout_steps < 1) throw ConfigError(where + ".rollout_steps must be at least 1");
  if (!(hp.max_grad_norm > 0.0)) throw ConfigError(where + ".max_grad_norm must be positive");
  if (!(hp.entropy_coef >= 0.0) || !(hp.value_coef > 0.0)) throw ConfigError(where + " has invalid loss coefficients");
}

json hp_json(const PpoHyperparameters& hp) {
  return {{"hidden", hp.hidden},
          {"learning_rate", hp.learning_rate},
          {"clip", hp.clip},
          {"gamma", hp.gamma},
          {"gae_lambda", hp.gae_lambda},
          {"epochs", hp.epochs},
          {"minibatch_size", hp.minibatch_size},
          {"entropy_coef", hp.entropy_coef},
          {"value_coef", hp.value_coef},
          {"max_grad_norm", hp.max_grad_norm},
          {"rollout_steps", hp.rollout_steps},
          {"initial_log_std", hp.initial_log_std},
          {"normalize_advantages", hp.normalize_advantages},
          {"value_normalization", hp.value_normalization}};
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require_known_keys(doc,
                     {"schema_version", "variant", "scenario", "train_agents", "eval_agents", "seeds",
                      "train_env_steps", "train_horizon", "eval_episodes", "eval_horizon", "k_obs", "slot_order",
                      "noise_variance_fraction", "priority_learner", "decision_learner"},
                     "config");
  if (!doc.contains("schema_version") || !doc.at("schema_version").is_number_integer() ||
      doc.at("schema_version").get<int>() != kConfigSchemaVersion) {
    throw ConfigError("config needs schema_version " + std::to_string(kConfigSchemaVersion));
  }

  ExperimentConfig cfg;
  if (doc.contains("variant")) {
    if (!doc.at("variant").is_string()) throw ConfigError("variant must be a string");
    cfg.variant = parse_variant(doc.at("variant").get<std::string>());
  }
  if (!doc.contains("scenario")) throw ConfigError("config lacks a scenario");
  const auto& sj = doc.at("scenario");
  if (sj.is_string()) {
    cfg.scenario_source = sj.get<std::string>();
    std::filesystem::path p(cfg.scenario_source);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    cfg.scenario = load_scenario(p);
  } else if (sj.is_object()) {
    cfg.scenario = parse_scenario(sj.dump());
  } else {
    throw ConfigError("scenario must be a path or an inline object");
  }

  read_opt(doc, "train_agents", cfg.train_agents, "config");
  read_opt(doc, "eval_agents", cfg.eval_agents, "config");
  read_opt(doc, "seeds", cfg.seeds, "config");
  read_opt(doc, "train_env_steps", cfg.train_env_steps, "config");
  read_opt(doc, "train_horizon", cfg.train_horizon, "config");
  read_opt(doc, "eval_episodes", cfg.eval_episodes, "config");
  read_opt(doc, "eval_horizon", cfg.eval_horizon, "config");
  read_opt(doc, "k_obs", cfg.k_obs, "config");
  if (doc.contains("slot_order")) {
    if (!doc.at("slot_order").is_string()) throw ConfigError("slot_order must be a string");
    cfg.slot_order = parse_slot_order(doc.at("slot_order").get<std::string>());
  }
  read_opt(doc, "noise_variance_fraction", cfg.noise.variance_fraction, "config");
  if (doc.contains("priority_learner")) cfg.priority_learner = parse_hp(doc.at("priority_learner"), "priority_learner");
  if (doc.contains("decision_learner")) cfg.decision_learner = parse_hp(doc.at("decision_learner"), "decision_learner");

  if (cfg.seeds.empty()) throw ConfigError("seeds must not be empty");
  if (cfg.train_env_steps < 1) throw ConfigError("train_env_steps must be positive");
  if (cfg.train_agents < 0 || cfg.eval_agents < 0) throw ConfigError("agent counts must be non-negative");
  if (cfg.train_horizon < 0) throw ConfigError("train_horizon must be non-negative");
  if (cfg.eval_episodes < 1 || cfg.eval_horizon < 1) throw ConfigError("evaluation needs episodes and a horizon");
  if (cfg.k_obs < 1) throw ConfigError("k_obs must be at least 1");
  if (!(cfg.noise.variance_fraction >= 0.0)) throw ConfigError("noise_variance_fraction must be non-negative");
  validate_hp(cfg.priority_learner, "priority_learner");
  validate_hp(cfg.decision_learner, "decision_learner");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string config_to_json(const ExperimentConfig& config) {
  json doc;
  doc["schema_version"] = kConfigSchemaVersion;
  doc["variant"] = to_string(config.variant);
  doc["scenario"] = json::parse(scenario_to_json(config.scenario));
  doc["train_agents"] = config.train_agents;
  doc["eval_agents"] = config.eval_agents;
  doc["seeds"] = config.seeds;
  doc["train_env_steps"] = config.train_env_steps;
  doc["train_horizon"] = config.train_horizon;
  doc["eval_episodes"] = config.eval_episodes;
  doc["eval_horizon"] = config.eval_horizon;
  doc["k_obs"] = config.k_obs;
  doc["slot_order"] = to_string(config.slot_order);
  doc["noise_variance_fraction"] = config.noise.variance_fraction;
  doc["priority_learner"] = hp_json(config.priority_learner);
  doc["decision_learner"] = hp_json(config.decision_learner);
  return doc.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& config) { return fnv1a(config_to_json(config)); }

std::uint64_t architecture_hash(const ExperimentConfig& config) {
  json doc;
  doc["scenario_kind"] = scenario_kind(config.scenario);
  doc["k_obs"] = config.k_obs;
  doc["priority_hidden"] = config.priority_learner.hidden;
  doc["decision_hidden"] = config.decision_learner.hidden;
  if (const auto* traffic = std::get_if<TrafficScenario>(&config.scenario)) doc["lanes"] = traffic->lanes.size();
  return fnv1a(doc.dump());
}

}  // namespace xpmarl
