#include "mbac/harness.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "mbac/errors.hpp"
#include "mbac/glr.hpp"
#include "mbac/rng.hpp"

namespace mbac {

namespace {

// Stream tags keep the seeds of different experiment parts independent.
constexpr std::uint64_t kInstanceStream = 1;
constexpr std::uint64_t kEpisodeStream = 2;
constexpr std::uint64_t kFlowStream = 3;

ThresholdConfig threshold_for(double delta, ConstantChoice constant,
                              std::size_t slices) {
  return {delta, constant.value_or(compute_constant(slices))};
}

template <typename T, typename Fmt>
std::string join(const std::vector<T>& xs, Fmt fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ';';
    out += fmt(xs[i]);
  }
  return out;
}

std::string join_doubles(const std::vector<double>& xs) {
  return join(xs, format_double);
}

std::string join_counts(const std::vector<std::uint64_t>& xs) {
  return join(xs, [](std::uint64_t n) { return std::to_string(n); });
}

std::vector<double> as_doubles(const std::vector<std::uint64_t>& xs) {
  return {xs.begin(), xs.end()};
}

std::string fixed(double x, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

}  // namespace

SampleSummary summarize(const std::vector<double>& xs) {
  SampleSummary s;
  if (xs.empty()) return s;
  RunningSummary r;
  for (double x : xs) r.add(x);
  s.mean = r.mean;
  s.ci_radius = 1.96 * std::sqrt(r.variance() / static_cast<double>(r.count));
  return s;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// ---- lower-bound ----------------------------------------------------------

LowerBoundRow cmd_lower_bound(const Instance& inst, Criterion crit,
                              double delta) {
  validate(inst);
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ValidationError("delta: must lie in (0, 1)");
  }
  LowerBoundRow row{crit, oracle(inst, crit), delta, 0.0};
  row.lower_bound = row.result.characteristic_time * confidence_factor(delta);
  return row;
}

void write_csv(std::ostream& out, const std::vector<LowerBoundRow>& rows) {
  out << "criterion,regime,characteristic_time,weights,easiest_answers,delta,"
         "lower_bound\n";
  for (const auto& r : rows) {
    out << to_string(r.criterion) << ','
        << (r.result.regime == Regime::NoAvailable ? "no-available"
                                                   : "available")
        << ',' << format_double(r.result.characteristic_time) << ','
        << join_doubles(r.result.weights) << ','
        << join(r.result.easiest_answers,
                [](Answer a) { return to_string(a); })
        << ',' << format_double(r.delta) << ','
        << format_double(r.lower_bound) << '\n';
  }
}

// ---- episode --------------------------------------------------------------

EpisodeRow cmd_episode(const Instance& inst, Criterion crit, Sampler sampler,
                       double delta, ConstantChoice constant,
                       std::uint64_t seed, std::uint64_t max_slots) {
  const auto cfg = threshold_for(delta, constant, inst.slices());
  EpisodeOptions options;
  options.max_slots = max_slots;
  return {crit, sampler, seed, cfg.constant_c,
          run_episode(inst, crit, cfg, sampler, seed, options)};
}

void write_csv(std::ostream& out, const std::vector<EpisodeRow>& rows) {
  out << "criterion,sampler,seed,constant_c,answer,tau,correct,"
         "final_statistic,final_threshold,counts,final_means\n";
  for (const auto& r : rows) {
    const auto& e = r.result;
    out << to_string(r.criterion) << ',' << to_string(r.sampler) << ','
        << r.seed << ',' << format_double(r.constant_c) << ','
        << to_string(e.answer) << ',' << e.tau << ','
        << (e.correct ? "true" : "false") << ','
        << format_double(e.final_statistic) << ','
        << format_double(e.final_threshold) << ',' << join_counts(e.counts)
        << ',' << join_doubles(e.final_means) << '\n';
  }
}

// ---- packet-bench ---------------------------------------------------------

std::vector<PacketRow> cmd_packet_bench(const PacketBenchConfig& cfg,
                                        const std::vector<Criterion>& criteria,
                                        const std::vector<Sampler>& samplers,
                                        ConstantChoice constant,
                                        std::uint64_t seed, std::size_t jobs) {
  validate(cfg.scenario);
  if (criteria.empty() || samplers.empty() || cfg.loads.empty()) {
    throw ValidationError("packet-bench: loads, criteria and samplers must "
                          "be non-empty");
  }
  const std::size_t runs = cfg.scenario.runs;
  const ThresholdConfig threshold_cfg =
      threshold_for(cfg.scenario.delta, constant, cfg.scenario.slices);
  const double factor = confidence_factor(cfg.scenario.delta);

  struct Cell {
    LoadLevel load;
    Criterion crit;
    Sampler sampler;
  };
  std::vector<Cell> cells;
  for (LoadLevel load : cfg.loads) {
    for (Criterion crit : criteria) {
      for (Sampler sampler : samplers) cells.push_back({load, crit, sampler});
    }
  }

  struct Outcome {
    std::uint64_t tau;
    double lower_bound;
  };
  const auto outcomes =
      parallel_map(cells.size() * runs, jobs, [&](std::size_t i) -> Outcome {
        const Cell& cell = cells[i / runs];
        const std::size_t run = i % runs;
        const auto level = static_cast<std::uint64_t>(cell.load);
        PacketScenario scenario = cfg.scenario;
        scenario.load = cell.load;
        const Instance inst = draw_instance(
            scenario, derive_seed(seed, {kInstanceStream, level, run}));
        try {
          const auto result =
              run_episode(inst, cell.crit, threshold_cfg, cell.sampler,
                          derive_seed(seed, {kEpisodeStream, level, run}));
          return {result.tau,
                  oracle(inst, cell.crit).characteristic_time * factor};
        } catch (const EpisodeTimeout& e) {
          throw EpisodeTimeout("packet-bench run " + std::to_string(run) +
                               " (" + std::string(to_string(cell.load)) + ", " +
                               std::string(to_string(cell.crit)) + ", " +
                               std::string(to_string(cell.sampler)) +
                               "): " + e.what());
        }
      });

  std::vector<PacketRow> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    PacketRow row{cells[c].load, cells[c].crit, cells[c].sampler, 0.0, 0.0,
                  0.0, runs, seed, {}};
    double lb = 0.0;
    for (std::size_t r = 0; r < runs; ++r) {
      row.taus.push_back(outcomes[c * runs + r].tau);
      lb += outcomes[c * runs + r].lower_bound;
    }
    const auto s = summarize(as_doubles(row.taus));
    row.mean_tau = s.mean;
    row.ci_radius = s.ci_radius;
    row.mean_lower_bound = lb / static_cast<double>(runs);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<PacketRow>& rows) {
  out << "load,criterion,sampler,mean_tau,ci_radius,mean_lower_bound,runs,"
         "seed\n";
  for (const auto& r : rows) {
    out << to_string(r.load) << ',' << to_string(r.criterion) << ','
        << to_string(r.sampler) << ',' << format_double(r.mean_tau) << ','
        << format_double(r.ci_radius) << ','
        << format_double(r.mean_lower_bound) << ',' << r.runs << ','
        << r.seed << '\n';
  }
}

// ---- delta-sweep ----------------------------------------------------------

Instance delta_sweep_instance(const DeltaSweepConfig& cfg, std::uint64_t seed) {
  if (cfg.instance) {
    validate(*cfg.instance);
    correct_answers(*cfg.instance, cfg.criterion);  // throws on a tied target
    return *cfg.instance;
  }
  return draw_instance(cfg.scenario, derive_seed(seed, {kInstanceStream}));
}

std::vector<DeltaRow> cmd_delta_sweep(const DeltaSweepConfig& cfg,
                                      ConstantChoice constant,
                                      std::uint64_t seed, std::size_t jobs) {
  if (cfg.deltas.empty()) throw ValidationError("deltas: must be non-empty");
  for (double d : cfg.deltas) {
    if (!(d > 0.0 && d < 1.0)) {
      throw ValidationError("deltas: every value must lie in (0, 1)");
    }
  }
  const Instance inst = delta_sweep_instance(cfg, seed);
  const double T = oracle(inst, cfg.criterion).characteristic_time;
  const std::size_t runs = cfg.scenario.runs;

  // Run r reuses its observation stream at every delta.
  const auto taus = parallel_map(
      cfg.deltas.size() * runs, jobs, [&](std::size_t i) -> std::uint64_t {
        const double delta = cfg.deltas[i / runs];
        const std::size_t run = i % runs;
        try {
          return run_episode(inst, cfg.criterion,
                             threshold_for(delta, constant, inst.slices()),
                             cfg.sampler,
                             derive_seed(seed, {kEpisodeStream, run}))
              .tau;
        } catch (const EpisodeTimeout& e) {
          throw EpisodeTimeout("delta-sweep run " + std::to_string(run) +
                               " (delta " + format_double(delta) +
                               "): " + e.what());
        }
      });

  std::vector<DeltaRow> rows;
  for (std::size_t d = 0; d < cfg.deltas.size(); ++d) {
    DeltaRow row;
    row.delta = cfg.deltas[d];
    row.runs = runs;
    row.taus.assign(taus.begin() + static_cast<std::ptrdiff_t>(d * runs),
                    taus.begin() + static_cast<std::ptrdiff_t>((d + 1) * runs));
    const auto s = summarize(as_doubles(row.taus));
    row.mean_tau = s.mean;
    row.ci_radius = s.ci_radius;
    row.lower_bound = T * confidence_factor(row.delta);
    row.ratio = row.mean_tau / row.lower_bound;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<DeltaRow>& rows) {
  out << "delta,mean_tau,lower_bound,ratio,runs\n";
  for (const auto& r : rows) {
    out << format_double(r.delta) << ',' << format_double(r.mean_tau) << ','
        << format_double(r.lower_bound) << ',' << format_double(r.ratio) << ','
        << r.runs << '\n';
  }
}

// ---- flow-bench -----------------------------------------------------------

std::vector<FlowRow> cmd_flow_bench(const FlowBenchConfig& cfg,
                                    const std::vector<Criterion>& criteria,
                                    ConstantChoice constant,
                                    std::uint64_t seed, std::size_t jobs) {
  validate(cfg.flow);
  if (criteria.empty() || cfg.loads.empty()) {
    throw ValidationError("flow-bench: loads and criteria must be non-empty");
  }
  const std::size_t n_crit = criteria.size();
  return parallel_map(
      cfg.loads.size() * n_crit, jobs, [&](std::size_t i) -> FlowRow {
        const std::size_t point = i / n_crit;
        const Criterion crit = criteria[i % n_crit];
        FlowConfig flow = cfg.flow;
        flow.arrival_rate = arrival_rate_for_load(flow, cfg.loads[point]);
        flow.seed = derive_seed(seed, {kFlowStream, point});
        flow.constant_c = constant;

        FlowRow row;
        row.rho = offered_load(flow);
        row.criterion = crit;
        row.horizon = flow.horizon;
        row.seed = seed;
        row.stats = simulate_flows(flow, crit, cfg.sampler);
        row.block_all = row.stats.blocking();
        const int top = *std::max_element(flow.rate_support.begin(),
                                          flow.rate_support.end());
        row.block_rate10 = row.stats.blocking_for_rate(std::min(top, 10));
        row.mean_measurements = row.stats.mean_measurements();
        row.mean_lower_bound = row.stats.mean_lower_bound();
        return row;
      });
}

void write_csv(std::ostream& out, const std::vector<FlowRow>& rows) {
  out << "rho,criterion,block_all,block_rate10,mean_measurements,"
         "mean_lower_bound,horizon,seed\n";
  for (const auto& r : rows) {
    out << format_double(r.rho) << ',' << to_string(r.criterion) << ','
        << format_double(r.block_all) << ',' << format_double(r.block_rate10)
        << ',' << format_double(r.mean_measurements) << ','
        << format_double(r.mean_lower_bound) << ',' << format_double(r.horizon)
        << ',' << r.seed << '\n';
  }
}

// ---- summaries ------------------------------------------------------------

void write_summary(std::ostream& out, const std::vector<LowerBoundRow>& rows) {
  for (const auto& r : rows) {
    out << std::left << std::setw(14) << to_string(r.criterion)
        << " T = " << fixed(r.result.characteristic_time, 4)
        << "  bound(delta=" << r.delta << ") = " << fixed(r.lower_bound, 2)
        << "\n  w* = " << join(r.result.weights,
                               [](double w) { return fixed(w, 4); })
        << "\n  easiest = "
        << join(r.result.easiest_answers, [](Answer a) { return to_string(a); })
        << '\n';
  }
}

void write_summary(std::ostream& out, const std::vector<EpisodeRow>& rows) {
  for (const auto& r : rows) {
    out << to_string(r.criterion) << " / " << to_string(r.sampler)
        << ": answer " << to_string(r.result.answer) << " after "
        << r.result.tau << " slots ("
        << (r.result.correct ? "correct" : "WRONG") << "), counts "
        << join_counts(r.result.counts) << '\n';
  }
}

void write_summary(std::ostream& out, const std::vector<PacketRow>& rows) {
  out << std::left << std::setw(8) << "load" << std::setw(14) << "criterion"
      << std::setw(13) << "sampler" << std::right << std::setw(12) << "mean tau"
      << std::setw(10) << "+/-" << std::setw(12) << "bound" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(8) << to_string(r.load) << std::setw(14)
        << to_string(r.criterion) << std::setw(13) << to_string(r.sampler)
        << std::right << std::setw(12) << fixed(r.mean_tau, 1) << std::setw(10)
        << fixed(r.ci_radius, 1) << std::setw(12)
        << fixed(r.mean_lower_bound, 1) << '\n';
  }
}

void write_summary(std::ostream& out, const std::vector<DeltaRow>& rows) {
  out << std::right << std::setw(10) << "delta" << std::setw(12) << "mean tau"
      << std::setw(12) << "bound" << std::setw(8) << "ratio" << '\n';
  for (const auto& r : rows) {
    out << std::setw(10) << r.delta << std::setw(12) << fixed(r.mean_tau, 1)
        << std::setw(12) << fixed(r.lower_bound, 1) << std::setw(8)
        << fixed(r.ratio, 3) << '\n';
  }
}

void write_summary(std::ostream& out, const std::vector<FlowRow>& rows) {
  out << std::left << std::setw(7) << "rho" << std::setw(14) << "criterion"
      << std::right << std::setw(10) << "block" << std::setw(10) << "block10"
      << std::setw(12) << "meas" << std::setw(12) << "bound" << std::setw(10)
      << "overload" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(7) << fixed(r.rho, 3) << std::setw(14)
        << to_string(r.criterion) << std::right << std::setw(10)
        << fixed(r.block_all, 4) << std::setw(10) << fixed(r.block_rate10, 4)
        << std::setw(12) << fixed(r.mean_measurements, 1) << std::setw(12)
        << fixed(r.mean_lower_bound, 1) << std::setw(10)
        << r.stats.overload_events << '\n';
  }
}

}  // namespace mbac
