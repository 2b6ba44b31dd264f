#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <iosfwd>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mbac/config.hpp"
#include "mbac/flowsim.hpp"
#include "mbac/oracle.hpp"
#include "mbac/tas.hpp"

namespace mbac {

/// Runs fn(0..n-1) on up to `jobs` threads. Results land at their index and
/// the exception of the lowest failing index is rethrown, so the outcome
/// does not depend on scheduling.
template <typename Fn>
auto parallel_map(std::size_t n, std::size_t jobs, Fn fn)
    -> std::vector<decltype(fn(std::size_t{}))> {
  using T = decltype(fn(std::size_t{}));
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  std::vector<T> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

/// Mean and 95% normal-approximation confidence radius.
struct SampleSummary {
  double mean = 0.0;
  double ci_radius = 0.0;
};
SampleSummary summarize(const std::vector<double>& xs);

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

// ---- lower-bound ----------------------------------------------------------

struct LowerBoundRow {
  Criterion criterion;
  OracleResult result;
  double delta = 0.0;
  double lower_bound = 0.0;  // T * d_B(delta, 1 - delta)
};

LowerBoundRow cmd_lower_bound(const Instance& inst, Criterion crit,
                              double delta);
void write_csv(std::ostream& out, const std::vector<LowerBoundRow>& rows);

// ---- episode --------------------------------------------------------------

struct EpisodeRow {
  Criterion criterion;
  Sampler sampler;
  std::uint64_t seed = 0;
  double constant_c = 0.0;
  EpisodeResult result;
};

EpisodeRow cmd_episode(const Instance& inst, Criterion crit, Sampler sampler,
                       double delta, ConstantChoice constant,
                       std::uint64_t seed, std::uint64_t max_slots);
void write_csv(std::ostream& out, const std::vector<EpisodeRow>& rows);

// ---- packet-bench ---------------------------------------------------------

struct PacketRow {
  LoadLevel load;
  Criterion criterion;
  Sampler sampler;
  double mean_tau = 0.0;
  double ci_radius = 0.0;
  double mean_lower_bound = 0.0;
  std::size_t runs = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> taus;  // per run; run r uses the same instance
                                    // and stream in every cell of its load
};

/// One row per (load, criterion, sampler). Instances are regenerated per run
/// and shared across criteria and samplers, so cells are paired by run.
std::vector<PacketRow> cmd_packet_bench(const PacketBenchConfig& cfg,
                                        const std::vector<Criterion>& criteria,
                                        const std::vector<Sampler>& samplers,
                                        ConstantChoice constant,
                                        std::uint64_t seed, std::size_t jobs);
void write_csv(std::ostream& out, const std::vector<PacketRow>& rows);

// ---- delta-sweep ----------------------------------------------------------

struct DeltaRow {
  double delta = 0.0;
  double mean_tau = 0.0;
  double ci_radius = 0.0;
  double lower_bound = 0.0;
  double ratio = 0.0;
  std::size_t runs = 0;
  std::vector<std::uint64_t> taus;
};

/// The instance used by a sweep: the configured one or a draw from `seed`.
Instance delta_sweep_instance(const DeltaSweepConfig& cfg, std::uint64_t seed);

std::vector<DeltaRow> cmd_delta_sweep(const DeltaSweepConfig& cfg,
                                      ConstantChoice constant,
                                      std::uint64_t seed, std::size_t jobs);
void write_csv(std::ostream& out, const std::vector<DeltaRow>& rows);

// ---- flow-bench -----------------------------------------------------------

struct FlowRow {
  double rho = 0.0;
  Criterion criterion;
  double block_all = 0.0;
  double block_rate10 = 0.0;
  double mean_measurements = 0.0;
  double mean_lower_bound = 0.0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  FlowSimStats stats;
};

/// One simulation per (load, criterion); criteria at the same load share
/// the arrival stream.
std::vector<FlowRow> cmd_flow_bench(const FlowBenchConfig& cfg,
                                    const std::vector<Criterion>& criteria,
                                    ConstantChoice constant,
                                    std::uint64_t seed, std::size_t jobs);
void write_csv(std::ostream& out, const std::vector<FlowRow>& rows);

// ---- human-readable summaries --------------------------------------------

void write_summary(std::ostream& out, const std::vector<LowerBoundRow>& rows);
void write_summary(std::ostream& out, const std::vector<EpisodeRow>& rows);
void write_summary(std::ostream& out, const std::vector<PacketRow>& rows);
void write_summary(std::ostream& out, const std::vector<DeltaRow>& rows);
void write_summary(std::ostream& out, const std::vector<FlowRow>& rows);

}  // namespace mbac
