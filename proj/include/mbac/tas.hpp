#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mbac/glr.hpp"
#include "mbac/oracle.hpp"
#include "mbac/rng.hpp"

namespace mbac {

enum class Sampler { TrackAndStop, RoundRobin };

std::string_view to_string(Sampler sampler);
Sampler parse_sampler(std::string_view text);

struct TrajectoryStep {
  std::size_t slice;   // zero-based
  double observation;
  double statistic;    // Q(t) evaluated before this measurement
  double threshold;    // f(t)
};

struct EpisodeOptions {
  std::uint64_t max_slots = 100'000'000;
  bool record_trajectory = false;
};

struct EpisodeResult {
  Answer answer;
  std::uint64_t tau = 0;
  bool correct = false;
  std::vector<std::uint64_t> counts;
  std::vector<double> final_means;
  double final_statistic = 0.0;
  double final_threshold = 0.0;
  std::vector<TrajectoryStep> trajectory;
};

/// Track-and-Stop sampling rule for the upcoming measurement t = n + 1:
/// the least-measured slice while some n_k < sqrt(t), otherwise
/// argmax_k t w_k - n_k. Ties go to the lowest index.
std::size_t select_slice(const EmpiricalState& state,
                         std::span<const double> weights);

/// Slice owed a forced-exploration measurement, if any.
std::optional<std::size_t> forced_exploration_slice(const EmpiricalState& state);

/// One observation from slice `slice` of the true instance.
double draw_observation(const Instance& inst, std::size_t slice, Rng& rng);

/// One admission episode: measure until the GLR statistic clears the
/// threshold, then return the easiest empirical answer. Throws
/// EpisodeTimeout once max_slots measurements have been taken.
EpisodeResult run_episode(const Instance& inst, Criterion crit,
                          const ThresholdConfig& cfg, Sampler sampler,
                          std::uint64_t seed, const EpisodeOptions& options = {});

}  // namespace mbac
