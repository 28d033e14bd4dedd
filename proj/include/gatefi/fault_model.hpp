#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "gatefi/transform.hpp"

namespace gatefi {

enum class FaultModel : std::uint8_t { StuckAt0, StuckAt1, Bitflip, Timing };

inline constexpr std::array<FaultModel, 4> kAllFaultModels = {FaultModel::StuckAt0, FaultModel::StuckAt1,
                                                              FaultModel::Bitflip, FaultModel::Timing};

// STUCK_AT_0, STUCK_AT_1, BITFLIP, TIMING
std::string_view to_string(FaultModel model);
std::optional<FaultModel> parse_fault_model(std::string_view text);

constexpr bool is_stuck_at(FaultModel m) { return m == FaultModel::StuckAt0 || m == FaultModel::StuckAt1; }

constexpr SaboteurMode saboteur_mode(FaultModel m) {
  switch (m) {
    case FaultModel::StuckAt0: return SaboteurMode::Stuck0;
    case FaultModel::StuckAt1: return SaboteurMode::Stuck1;
    case FaultModel::Bitflip: return SaboteurMode::Invert;
    case FaultModel::Timing: return SaboteurMode::Delay;
  }
  return SaboteurMode::Transparent;
}

}  // namespace gatefi
