#include "mbac/flowsim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <string>

#include "mbac/errors.hpp"
#include "mbac/rng.hpp"

namespace mbac {

namespace {

struct Departure {
  double time;
  std::uint64_t id;
  std::size_t slice;
  int rate;

  bool operator>(const Departure& other) const {
    return time != other.time ? time > other.time : id > other.id;
  }
};

class Simulator {
 public:
  Simulator(const FlowConfig& cfg, Criterion crit, Sampler sampler)
      : cfg_(cfg),
        crit_(crit),
        sampler_(sampler),
        rng_(derive_seed(cfg.seed, {0})),
        loads_(cfg.slices, 0.0),
        active_(cfg.slices, 0) {
    const int max_rate =
        *std::max_element(cfg.rate_support.begin(), cfg.rate_support.end());
    stats_.arrivals_by_rate.assign(static_cast<std::size_t>(max_rate) + 1, 0);
    stats_.blocked_by_rate.assign(static_cast<std::size_t>(max_rate) + 1, 0);
    stats_.batch_arrivals.assign(cfg.batches, 0);
    stats_.batch_blocked.assign(cfg.batches, 0);
  }

  FlowSimStats run() {
    if (cfg_.arrival_rate <= 0.0) return std::move(stats_);
    double next_arrival = rng_.exponential(cfg_.arrival_rate);
    std::uint64_t index = 0;
    while (next_arrival < cfg_.horizon) {
      depart_until(next_arrival);
      handle_arrival(next_arrival, index++);
      next_arrival += rng_.exponential(cfg_.arrival_rate);
    }
    depart_until(cfg_.horizon);
    advance_clock(cfg_.horizon);
    return std::move(stats_);
  }

 private:
  void advance_clock(double t) {
    if (std::any_of(loads_.begin(), loads_.end(),
                    [&](double l) { return l > cfg_.capacity; })) {
      stats_.overload_time += t - clock_;
    }
    clock_ = t;
  }

  void depart_until(double t) {
    while (!departures_.empty() && departures_.top().time <= t) {
      const Departure d = departures_.top();
      departures_.pop();
      advance_clock(d.time);
      loads_[d.slice] -= d.rate;
      --active_[d.slice];
      if (cfg_.record_events) {
        stats_.events.push_back({d.time, FlowEvent::Kind::Departed, d.rate,
                                 d.slice, loads_, active_});
      }
    }
    advance_clock(t);
  }

  std::size_t batch_of(double t) const {
    const auto b = static_cast<std::size_t>(
        t / cfg_.horizon * static_cast<double>(cfg_.batches));
    return std::min(b, cfg_.batches - 1);
  }

  void handle_arrival(double t, std::uint64_t index) {
    const int rate = cfg_.rate_support[rng_.below(cfg_.rate_support.size())];
    const double holding = rng_.exponential(1.0 / cfg_.mean_duration);
    ++stats_.arrivals_by_rate[static_cast<std::size_t>(rate)];
    ++stats_.batch_arrivals[batch_of(t)];

    const std::vector<double> seen = loads_;
    std::uint64_t slots = 0;
    const std::optional<std::size_t> slice = decide(rate, index, slots);

    if (!slice) {
      ++stats_.blocked_by_rate[static_cast<std::size_t>(rate)];
      ++stats_.batch_blocked[batch_of(t)];
      if (cfg_.record_events) {
        stats_.events.push_back(
            {t, FlowEvent::Kind::Blocked, rate, 0, seen, active_});
      }
      return;
    }
    loads_[*slice] += rate;
    ++active_[*slice];
    if (loads_[*slice] > cfg_.capacity) ++stats_.overload_events;
    const double start = t + static_cast<double>(slots) * cfg_.slot_duration;
    departures_.push({start + holding, next_id_++, *slice, rate});
    if (cfg_.record_events) {
      stats_.events.push_back(
          {t, FlowEvent::Kind::Admitted, rate, *slice, seen, active_});
    }
  }

  std::optional<std::size_t> decide(int rate, std::uint64_t index,
                                    std::uint64_t& slots) {
    double gamma = cfg_.capacity - rate;
    if (gamma <= 0.0) {
      ++stats_.blocked_without_measurement;
      return std::nullopt;
    }
    if (std::any_of(loads_.begin(), loads_.end(),
                    [&](double l) { return l == gamma; })) {
      gamma -= 1e-9;
      ++stats_.threshold_perturbations;
    }
    Instance truth{loads_, gamma, Family::Poisson};
    for (double& m : truth.mu) m = clamp_mean(Family::Poisson, m);

    if (cfg_.admission == AdmissionMode::PerfectInformation) {
      const Answer a = easiest_answer(truth.mu, gamma, crit_);
      if (a.is_reject()) return std::nullopt;
      return a.index();
    }

    const ReducedInstance reduced = reduce_target_ties(truth, crit_);
    if (reduced.reduced) ++stats_.tie_reductions;
    const Instance& inst = reduced.instance;

    const ThresholdConfig threshold_cfg{
        cfg_.delta, cfg_.constant_c.value_or(compute_constant(inst.slices()))};
    EpisodeOptions options;
    options.max_slots = cfg_.max_slots_per_decision;
    EpisodeResult episode;
    try {
      episode = run_episode(inst, crit_, threshold_cfg, sampler_,
                            derive_seed(cfg_.seed, {1, index}), options);
    } catch (const EpisodeTimeout& e) {
      throw EpisodeTimeout("flow arrival " + std::to_string(index) +
                           " (rate " + std::to_string(rate) + "): " + e.what());
    }

    slots = episode.tau;
    ++stats_.decisions;
    stats_.total_measurement_slots += episode.tau;
    stats_.measurement.add(static_cast<double>(episode.tau));
    stats_.lower_bound_sum += oracle(inst, crit_).characteristic_time *
                              confidence_factor(cfg_.delta);

    if (episode.answer.is_reject()) {
      if (!is_correct(truth, crit_, Answer::reject())) ++stats_.wrong_decisions;
      return std::nullopt;
    }
    const std::size_t chosen = reduced.original_index[episode.answer.index()];
    if (!is_correct(truth, crit_, Answer::slice(chosen))) {
      ++stats_.wrong_decisions;
    }
    return chosen;
  }

  const FlowConfig& cfg_;
  Criterion crit_;
  Sampler sampler_;
  Rng rng_;
  std::vector<double> loads_;
  std::vector<std::size_t> active_;
  std::priority_queue<Departure, std::vector<Departure>, std::greater<>>
      departures_;
  std::uint64_t next_id_ = 0;
  double clock_ = 0.0;
  FlowSimStats stats_;
};

}  // namespace

void RunningSummary::add(double x) {
  ++count;
  const double delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (x - mean);
  max = std::max(max, x);
}

void validate(const FlowConfig& cfg) {
  if (cfg.slices < 1) throw ValidationError("slices: must be >= 1");
  if (!(cfg.capacity > 0.0)) throw ValidationError("capacity: must be > 0");
  if (!(cfg.arrival_rate >= 0.0)) {
    throw ValidationError("arrival_rate: must be >= 0");
  }
  if (cfg.rate_support.empty()) {
    throw ValidationError("rate_support: must not be empty");
  }
  for (int r : cfg.rate_support) {
    if (r < 1) throw ValidationError("rate_support: rates must be >= 1");
  }
  if (!(cfg.mean_duration > 0.0)) {
    throw ValidationError("mean_duration: must be > 0");
  }
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    throw ValidationError("delta: must lie in (0, 1)");
  }
  if (!(cfg.horizon > 0.0)) throw ValidationError("horizon: must be > 0");
  if (cfg.batches < 1) throw ValidationError("batches: must be >= 1");
  if (cfg.constant_c && !(*cfg.constant_c >= std::exp(1.0) - 1e-12)) {
    throw ValidationError("constant_c: must be >= e");
  }
  if (!(cfg.slot_duration >= 0.0)) {
    throw ValidationError("slot_duration: must be >= 0");
  }
  if (cfg.admission == AdmissionMode::Measured) {
    // Slice loads are sums of admitted rates. A load sitting exactly at
    // gamma = capacity - r cannot be resolved by measurement, so such
    // capacities are refused up front.
    const double whole = std::floor(cfg.capacity);
    if (whole == cfg.capacity && whole <= 1e6) {
      const auto top = static_cast<std::size_t>(whole);
      std::vector<char> reachable(top + 1, 0);
      reachable[0] = 1;
      for (std::size_t v = 1; v <= top; ++v) {
        for (int r : cfg.rate_support) {
          const auto ur = static_cast<std::size_t>(r);
          if (ur <= v && reachable[v - ur]) reachable[v] = 1;
        }
      }
      for (int r : cfg.rate_support) {
        const auto ur = static_cast<std::size_t>(r);
        if (ur < top && reachable[top - ur]) {
          throw ValidationError(
              "capacity: a slice load can equal capacity - rate exactly "
              "(rate " + std::to_string(r) +
              "); use a capacity that no sum of rates reaches, e.g. 15.5");
        }
      }
    }
  }
}

double mean_rate(const FlowConfig& cfg) {
  const double sum =
      std::accumulate(cfg.rate_support.begin(), cfg.rate_support.end(), 0.0);
  return sum / static_cast<double>(cfg.rate_support.size());
}

double offered_load(const FlowConfig& cfg) {
  return cfg.arrival_rate * mean_rate(cfg) /
         (cfg.capacity * static_cast<double>(cfg.slices));
}

double arrival_rate_for_load(const FlowConfig& cfg, double rho) {
  return rho * cfg.capacity * static_cast<double>(cfg.slices) / mean_rate(cfg);
}

std::uint64_t FlowSimStats::arrivals() const {
  return std::accumulate(arrivals_by_rate.begin(), arrivals_by_rate.end(),
                         std::uint64_t{0});
}

std::uint64_t FlowSimStats::blocked() const {
  return std::accumulate(blocked_by_rate.begin(), blocked_by_rate.end(),
                         std::uint64_t{0});
}

double FlowSimStats::blocking() const {
  const auto n = arrivals();
  return n == 0 ? 0.0 : static_cast<double>(blocked()) / static_cast<double>(n);
}

double FlowSimStats::blocking_for_rate(int rate) const {
  const auto r = static_cast<std::size_t>(rate);
  if (rate < 0 || r >= arrivals_by_rate.size() || arrivals_by_rate[r] == 0) {
    return 0.0;
  }
  return static_cast<double>(blocked_by_rate[r]) /
         static_cast<double>(arrivals_by_rate[r]);
}

double FlowSimStats::mean_measurements() const {
  return measurement.count == 0 ? 0.0 : measurement.mean;
}

double FlowSimStats::mean_lower_bound() const {
  return decisions == 0 ? 0.0
                        : lower_bound_sum / static_cast<double>(decisions);
}

double FlowSimStats::blocking_ci_radius() const {
  RunningSummary per_batch;
  for (std::size_t b = 0; b < batch_arrivals.size(); ++b) {
    if (batch_arrivals[b] == 0) continue;
    per_batch.add(static_cast<double>(batch_blocked[b]) /
                  static_cast<double>(batch_arrivals[b]));
  }
  if (per_batch.count < 2) return 0.0;
  return 1.96 * std::sqrt(per_batch.variance() /
                          static_cast<double>(per_batch.count));
}

ReducedInstance reduce_target_ties(const Instance& inst, Criterion crit) {
  ReducedInstance out{inst, {}, false};
  out.original_index.resize(inst.slices());
  std::iota(out.original_index.begin(), out.original_index.end(), 0);
  if (crit == Criterion::AnyAvailable) return out;

  const Answer target = easiest_answer(inst.mu, inst.gamma, crit);
  if (target.is_reject()) return out;
  const double target_load = inst.mu[target.index()];

  Instance kept{{}, inst.gamma, inst.family};
  std::vector<std::size_t> index;
  for (std::size_t k = 0; k < inst.slices(); ++k) {
    if (k != target.index() && inst.mu[k] == target_load) continue;
    kept.mu.push_back(inst.mu[k]);
    index.push_back(k);
  }
  if (kept.slices() == inst.slices()) return out;
  return ReducedInstance{std::move(kept), std::move(index), true};
}

FlowSimStats simulate_flows(const FlowConfig& cfg, Criterion crit,
                            Sampler sampler) {
  validate(cfg);
  Simulator sim(cfg, crit, sampler);
  return sim.run();
}

double erlang_b(std::size_t servers, double load) {
  double b = 1.0;
  for (std::size_t n = 1; n <= servers; ++n) {
    b = load * b / (static_cast<double>(n) + load * b);
  }
  return b;
}

}  // namespace mbac
