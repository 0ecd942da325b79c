// End-to-end solves for the three system variants: relay plus RIS (the full
// pipeline), relay only, and the full-duplex RIS-only baseline.
#pragma once

#include <optional>
#include <string_view>

#include "relayris/phase_search.hpp"

namespace relayris {

// Joint solve: coordinate descent over both phase vectors around the
// SVD/water-filling BS stage and the configured relay stage.
SolveReport solve_relay_ris(const ChannelSet& channels, const SystemConfig& config,
                            const SearchSettings& settings);

// Reflected paths removed entirely; one SVD/water-filling plus duality solve.
SolveReport solve_relay_only(const ChannelSet& channels, const SystemConfig& config,
                             const FixedPointSettings& fixed_point = {});

// No relay, no half-duplex split: BS serves the users directly at SINR
// targets 2^{R_th} - 1 through the duality machinery, with theta1 optimized
// by the same coordinate search. Reported power is the full-time sum power.
SolveReport solve_ris_only(const ChannelSet& channels, const SystemConfig& config,
                           const SearchSettings& settings);

enum class Scenario { kRelayRisDuality, kRelayRisZf, kRelayOnly, kRisOnly };

inline constexpr Scenario kAllScenarios[] = {Scenario::kRelayRisDuality, Scenario::kRelayRisZf,
                                             Scenario::kRelayOnly, Scenario::kRisOnly};

std::string_view scenario_name(Scenario scenario);
std::optional<Scenario> scenario_from_name(std::string_view name);

SolveReport solve_scenario(Scenario scenario, const ChannelSet& channels,
                           const SystemConfig& config, const SearchSettings& settings);

}  // namespace relayris
