#pragma once

#include <array>
#include <string>
#include <string_view>

#include "xpmarl/pipeline.hpp"

namespace xpmarl {

/// The five compared models.
enum class Variant {
  XpMarl,            // M1: learned priorities + action propagation
  Vanilla,           // M2: simultaneous actions
  OpponentModel,     // M3: simultaneous actions + predicted slots
  RandomPriority,    // M4: random priorities + action propagation
  NoisyComm,         // M5: M1 with noisy communicated actions
};

inline constexpr std::array<Variant, 5> kAllVariants{Variant::XpMarl, Variant::Vanilla,
                                                     Variant::OpponentModel,
                                                     Variant::RandomPriority, Variant::NoisyComm};

/// Accepts "M1_xp" ... "M5_noisy_comm" as well as the short "M1" ... "M5".
/// Throws ConfigError otherwise.
Variant parse_variant(std::string_view text);
std::string to_string(Variant variant);
std::string short_name(Variant variant);

PipelineWiring wire_variant(Variant variant, NoiseSpec noise);

}  // namespace xpmarl
