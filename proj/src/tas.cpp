#include "mbac/tas.hpp"

#include <string>

#include "mbac/errors.hpp"

namespace mbac {

std::string_view to_string(Sampler sampler) {
  switch (sampler) {
    case Sampler::TrackAndStop:
      return "tas";
    case Sampler::RoundRobin:
      return "round-robin";
  }
  return "?";
}

Sampler parse_sampler(std::string_view text) {
  if (text == "tas" || text == "track-and-stop") return Sampler::TrackAndStop;
  if (text == "round-robin" || text == "uniform") return Sampler::RoundRobin;
  throw ValidationError("sampler: expected 'tas' or 'round-robin', got '" +
                        std::string(text) + "'");
}

std::optional<std::size_t> forced_exploration_slice(
    const EmpiricalState& state) {
  const std::uint64_t t = state.t() + 1;
  const auto& n = state.counts();
  std::size_t least = 0;
  bool starved = false;
  for (std::size_t k = 0; k < n.size(); ++k) {
    if (n[k] * n[k] < t) starved = true;  // n_k < sqrt(t)
    if (n[k] < n[least]) least = k;
  }
  if (!starved) return std::nullopt;
  return least;
}

std::size_t select_slice(const EmpiricalState& state,
                         std::span<const double> weights) {
  if (auto forced = forced_exploration_slice(state)) return *forced;
  const double t = static_cast<double>(state.t() + 1);
  const auto& n = state.counts();
  std::size_t best = 0;
  double best_gap = t * weights[0] - static_cast<double>(n[0]);
  for (std::size_t k = 1; k < n.size(); ++k) {
    const double gap = t * weights[k] - static_cast<double>(n[k]);
    if (gap > best_gap) {
      best = k;
      best_gap = gap;
    }
  }
  return best;
}

double draw_observation(const Instance& inst, std::size_t slice, Rng& rng) {
  const double mean = inst.mu[slice];
  switch (inst.family) {
    case Family::Bernoulli:
      return rng.bernoulli(mean);
    case Family::Poisson:
      return static_cast<double>(rng.poisson(mean));
  }
  return 0.0;
}

EpisodeResult run_episode(const Instance& inst, Criterion crit,
                          const ThresholdConfig& cfg, Sampler sampler,
                          std::uint64_t seed, const EpisodeOptions& options) {
  validate(inst);
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    throw ValidationError("delta must lie in (0, 1)");
  }
  const std::size_t K = inst.slices();
  EmpiricalState state(K);
  Rng rng(seed);
  EpisodeResult result;
  std::vector<double> counts(K, 0.0);

  for (std::uint64_t t = 1;; ++t) {
    const auto means = state.clamped_means(inst.family);
    const Answer candidate = easiest_answer(means, inst.gamma, crit);
    for (std::size_t k = 0; k < K; ++k) {
      counts[k] = static_cast<double>(state.counts()[k]);
    }
    const double q = detail::alternative_infimum(inst.family, means, inst.gamma,
                                                 crit, candidate, counts);
    const double f = threshold(cfg, t);
    if (q > f) {
      result.answer = candidate;
      result.tau = state.t();
      result.final_statistic = q;
      result.final_threshold = f;
      break;
    }
    if (state.t() >= options.max_slots) {
      throw EpisodeTimeout("episode exceeded " +
                           std::to_string(options.max_slots) +
                           " measurement slots");
    }

    std::size_t slice = 0;
    if (sampler == Sampler::RoundRobin) {
      slice = static_cast<std::size_t>((t - 1) % K);
    } else if (auto forced = forced_exploration_slice(state)) {
      slice = *forced;
    } else {
      const Instance estimate{means, inst.gamma, inst.family};
      const auto weights = oracle(estimate, crit, TiePolicy::LowestIndex).weights;
      slice = select_slice(state, weights);
    }

    const double x = draw_observation(inst, slice, rng);
    state.record(slice, x);
    if (options.record_trajectory) {
      result.trajectory.push_back({slice, x, q, f});
    }
  }

  result.counts = state.counts();
  result.final_means = state.means();
  result.correct = is_correct(inst, crit, result.answer);
  return result;
}

}  // namespace mbac
