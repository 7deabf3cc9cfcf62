#include "xpmarl/harness/variant.hpp"

#include "xpmarl/errors.hpp"

namespace xpmarl {

Variant parse_variant(std::string_view text) {
  for (Variant v : kAllVariants) {
    if (text == to_string(v) || text == short_name(v)) return v;
  }
  throw ConfigError("unknown variant '" + std::string(text) + "' (expected M1_xp, M2_vanilla, M3_opponent_model, "
                    "M4_random_priority or M5_noisy_comm)");
}

std::string to_string(Variant variant) {
  switch (variant) {
    case Variant::XpMarl: return "M1_xp";
    case Variant::Vanilla: return "M2_vanilla";
    case Variant::OpponentModel: return "M3_opponent_model";
    case Variant::RandomPriority: return "M4_random_priority";
    case Variant::NoisyComm: return "M5_noisy_comm";
  }
  return "unknown";
}

std::string short_name(Variant variant) { return to_string(variant).substr(0, 2); }

PipelineWiring wire_variant(Variant variant, NoiseSpec noise) {
  switch (variant) {
    case Variant::XpMarl: return {PrioritySource::Learned, SlotSource::Propagated, NoiseSpec{}};
    case Variant::Vanilla: return {PrioritySource::None, SlotSource::Empty, NoiseSpec{}};
    case Variant::OpponentModel: return {PrioritySource::None, SlotSource::Predicted, NoiseSpec{}};
    case Variant::RandomPriority: return {PrioritySource::Random, SlotSource::Propagated, NoiseSpec{}};
    case Variant::NoisyComm: return {PrioritySource::Learned, SlotSource::Propagated, noise};
  }
  throw ConfigError("unhandled variant");
}

}  // namespace xpmarl
