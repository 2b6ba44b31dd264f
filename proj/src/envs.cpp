#include "mbac/envs.hpp"

#include <algorithm>
#include <string>

#include "mbac/errors.hpp"
#include "mbac/rng.hpp"

namespace mbac {

namespace {

bool valid_for_all_criteria(const Instance& inst) {
  if (std::any_of(inst.mu.begin(), inst.mu.end(), [&](double m) {
        return m <= 0.0 || m == inst.gamma ||
               (inst.family == Family::Bernoulli && m >= 1.0);
      })) {
    return false;
  }
  try {
    correct_answers(inst, Criterion::Packing);
    correct_answers(inst, Criterion::LeastLoaded);
  } catch (const AmbiguityError&) {
    return false;
  }
  // Least-loaded target must be unique even in the reject regime, so that
  // the same instance stays usable if gamma moves.
  const auto lowest = *std::min_element(inst.mu.begin(), inst.mu.end());
  return std::count(inst.mu.begin(), inst.mu.end(), lowest) == 1;
}

}  // namespace

std::string_view to_string(LoadLevel level) {
  switch (level) {
    case LoadLevel::Low:
      return "low";
    case LoadLevel::Medium:
      return "medium";
    case LoadLevel::High:
      return "high";
  }
  return "?";
}

LoadLevel parse_load_level(std::string_view text) {
  if (text == "low") return LoadLevel::Low;
  if (text == "medium") return LoadLevel::Medium;
  if (text == "high") return LoadLevel::High;
  throw ValidationError("load: expected 'low', 'medium' or 'high', got '" +
                        std::string(text) + "'");
}

int per_slice_load(LoadLevel level) {
  switch (level) {
    case LoadLevel::Low:
      return 17;
    case LoadLevel::Medium:
      return 23;
    case LoadLevel::High:
      return 30;
  }
  return 0;
}

void validate(const PacketScenario& scenario) {
  if (scenario.slices < 1) throw ValidationError("slices: must be >= 1");
  if (scenario.runs < 1) throw ValidationError("runs: must be >= 1");
  if (!(scenario.delta > 0.0 && scenario.delta < 1.0)) {
    throw ValidationError("delta: must lie in (0, 1)");
  }
  if (scenario.family != Family::Poisson) {
    throw ValidationError("family: packet scenarios produce integer loads, "
                          "which only the poisson family supports");
  }
  if (!in_domain(scenario.family, scenario.gamma)) {
    throw ValidationError("gamma: outside the family's mean domain");
  }
}

Instance draw_instance(const PacketScenario& scenario, std::uint64_t seed) {
  validate(scenario);
  Rng rng(seed);
  const std::size_t K = scenario.slices;
  const std::uint64_t units =
      static_cast<std::uint64_t>(K) * per_slice_load(scenario.load);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<double> mu(K, 0.0);
    for (std::uint64_t u = 0; u < units; ++u) mu[rng.below(K)] += 1.0;
    Instance inst{std::move(mu), scenario.gamma, scenario.family};
    if (valid_for_all_criteria(inst)) return inst;
  }
  throw ValidationError("draw_instance: 1000 redraws without a valid instance");
}

}  // namespace mbac
