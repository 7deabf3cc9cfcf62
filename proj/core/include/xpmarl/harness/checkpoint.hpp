#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "xpmarl/harness/config.hpp"
#include "xpmarl/learner/trainer.hpp"

namespace xpmarl {

inline constexpr int kCheckpointVersion = 1;

/// Trained parameters of both instances plus everything needed to rebuild the
/// evaluation pipeline.
struct Checkpoint {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  SlotLayout layout;
  std::size_t obs_dim = 0;
  std::optional<Actor> priority_actor;
  std::optional<Critic> priority_critic;
  std::optional<Actor> decision_actor;
  std::optional<Critic> decision_critic;
  std::string rng_state;

  PipelineWiring wiring() const { return wire_variant(config.variant, config.noise); }
  PolicySet policies() const;
};

Checkpoint make_checkpoint(const BiStageTrainer& trainer, const ExperimentConfig& config,
                           std::uint64_t seed, std::size_t obs_dim, const Rng& rng);

/// Structured-text (JSON) dump; doubles round-trip exactly.
std::string checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const std::string& text);
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace xpmarl
