#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mbac/oracle.hpp"
#include "mbac/tas.hpp"

namespace mbac {

enum class AdmissionMode {
  Measured,            // a fresh measurement episode per arrival
  PerfectInformation,  // decide from the true loads, no measurement
};

struct FlowConfig {
  std::size_t slices = 3;
  double capacity = 15.5;     // packets/slot per slice
  double arrival_rate = 0.0;  // flows per time unit
  std::vector<int> rate_support = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double mean_duration = 1.0;
  double delta = 0.01;
  double horizon = 1000.0;
  std::uint64_t seed = 0;

  /// Overrides the computed threshold constant C.
  std::optional<double> constant_c;
  AdmissionMode admission = AdmissionMode::Measured;
  /// When > 0, each measurement slot holds the arriving flow's resources
  /// for this many time units before its service starts.
  double slot_duration = 0.0;
  std::uint64_t max_slots_per_decision = 100'000'000;
  std::size_t batches = 10;
  bool record_events = false;
};

void validate(const FlowConfig& cfg);

/// Mean flow rate of the rate support.
double mean_rate(const FlowConfig& cfg);
/// System load rho = arrival_rate * mean_rate / (capacity * K).
double offered_load(const FlowConfig& cfg);
/// Arrival rate giving load rho.
double arrival_rate_for_load(const FlowConfig& cfg, double rho);

struct RunningSummary {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double max = 0.0;

  void add(double x);
  double variance() const { return count > 1 ? m2 / double(count - 1) : 0.0; }
};

struct FlowEvent {
  enum class Kind { Admitted, Blocked, Departed };
  double time = 0.0;
  Kind kind = Kind::Blocked;
  int rate = 0;
  std::size_t slice = 0;          // meaningless for Blocked
  std::vector<double> loads;      // slice loads the decision saw / after a departure
  std::vector<std::size_t> active_after;  // admitted flows per slice after the event
};

struct FlowSimStats {
  std::vector<std::uint64_t> arrivals_by_rate;  // indexed by rate value
  std::vector<std::uint64_t> blocked_by_rate;
  std::uint64_t total_measurement_slots = 0;
  std::uint64_t decisions = 0;  // measurement episodes run
  std::uint64_t blocked_without_measurement = 0;
  std::uint64_t wrong_decisions = 0;
  RunningSummary measurement;
  double lower_bound_sum = 0.0;
  std::uint64_t overload_events = 0;
  double overload_time = 0.0;
  std::uint64_t threshold_perturbations = 0;
  std::uint64_t tie_reductions = 0;
  std::vector<std::uint64_t> batch_arrivals;
  std::vector<std::uint64_t> batch_blocked;
  std::vector<FlowEvent> events;

  std::uint64_t arrivals() const;
  std::uint64_t blocked() const;
  double blocking() const;
  double blocking_for_rate(int rate) const;
  double mean_measurements() const;
  double mean_lower_bound() const;
  /// 95% batch-means confidence radius of the overall blocking.
  double blocking_ci_radius() const;
};

/// Frozen instance handed to one measurement episode, with duplicate
/// targets removed.
struct ReducedInstance {
  Instance instance;
  std::vector<std::size_t> original_index;
  bool reduced = false;
};

/// For packing / least-loaded, keeps only the lowest-indexed slice among
/// those tied at the target load. Any tied slice is an equally valid
/// admission, while measuring to separate them would never stop.
ReducedInstance reduce_target_ties(const Instance& inst, Criterion crit);

/// Event-driven flow-level simulation: Poisson arrivals, uniform rate
/// classes, exponential holding times, admission by one measurement episode
/// per arrival against the frozen slice loads.
FlowSimStats simulate_flows(const FlowConfig& cfg, Criterion crit,
                            Sampler sampler);

/// Erlang-B blocking for `servers` servers and offered load `load` Erlangs.
double erlang_b(std::size_t servers, double load);

}  // namespace mbac
