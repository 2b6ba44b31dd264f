#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "mbac/divergence.hpp"
#include "mbac/oracle.hpp"

namespace mbac {

enum class LoadLevel { Low, Medium, High };

std::string_view to_string(LoadLevel level);
LoadLevel parse_load_level(std::string_view text);

/// Average load per slice for a level, packets/slot: 17, 23, 30.
int per_slice_load(LoadLevel level);

/// Packet-level scenario: K slices, threshold gamma, random integer loads
/// with a fixed total of K * per_slice_load(level) units.
struct PacketScenario {
  std::size_t slices = 8;
  double gamma = 24.0;  // 24 flows x 50 packets/s x 20 ms slots
  Family family = Family::Poisson;
  LoadLevel load = LoadLevel::Low;
  std::size_t runs = 100;
  double delta = 0.01;
};

void validate(const PacketScenario& scenario);

/// Multinomial load vector: each of the K * average load units goes to a
/// uniformly random slice. Draws are redrawn while any load is zero, equals
/// gamma, or while the least-loaded or packing slice is tied, so the result
/// is a valid instance for every criterion. Gives up after 1000 redraws.
Instance draw_instance(const PacketScenario& scenario, std::uint64_t seed);

}  // namespace mbac
