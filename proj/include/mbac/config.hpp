#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mbac/divergence.hpp"
#include "mbac/envs.hpp"
#include "mbac/flowsim.hpp"
#include "mbac/oracle.hpp"
#include "mbac/tas.hpp"

namespace mbac {

inline constexpr int kConfigVersion = 1;

/// Threshold constant C: nullopt means compute_constant(K) for the K at hand.
using ConstantChoice = std::optional<double>;

struct PacketBenchConfig {
  PacketScenario scenario;  // `load` is overridden per level
  std::vector<LoadLevel> loads = {LoadLevel::Low, LoadLevel::Medium,
                                  LoadLevel::High};
};

struct DeltaSweepConfig {
  PacketScenario scenario{8, 24.0, Family::Poisson, LoadLevel::High, 50, 0.01};
  /// Fixed instance; when absent one is drawn from the seed.
  std::optional<Instance> instance;
  std::vector<double> deltas = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
  Criterion criterion = Criterion::Packing;
  Sampler sampler = Sampler::TrackAndStop;
};

struct FlowBenchConfig {
  FlowConfig flow;  // arrival_rate and seed are set per point
  std::vector<double> loads = {0.5, 0.6, 0.7, 0.8, 0.9};
  Sampler sampler = Sampler::TrackAndStop;
};

/// Everything a CLI run needs. Every field has a default, so an absent
/// config file and `{"version": 1}` are equivalent.
struct ExperimentConfig {
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::optional<std::string> out;
  ConstantChoice constant_c;
  double delta = 0.01;
  std::vector<Criterion> criteria = {Criterion::AnyAvailable,
                                     Criterion::Packing,
                                     Criterion::LeastLoaded};
  std::vector<Sampler> samplers = {Sampler::TrackAndStop, Sampler::RoundRobin};

  /// For lower-bound and episode.
  std::optional<Instance> instance;
  std::uint64_t max_slots = 100'000'000;

  PacketBenchConfig packet;
  DeltaSweepConfig delta_sweep;
  FlowBenchConfig flow;
};

/// Parses a JSON document. Unknown keys, a missing or wrong "version" and
/// out-of-range values raise ValidationError naming the offending key.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Parses "auto" or a number >= e.
ConstantChoice parse_constant(const std::string& text);

/// Parses a comma-separated list of doubles, e.g. "0.2,0.45,0.7".
std::vector<double> parse_double_list(const std::string& text);

}  // namespace mbac
