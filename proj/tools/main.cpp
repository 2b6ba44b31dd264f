// mbac: admission-control oracles, single episodes and benchmark sweeps.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mbac/config.hpp"
#include "mbac/errors.hpp"
#include "mbac/harness.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

// Flags that override config keys; unset optionals leave the config alone.
struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> jobs;
  bool summary = false;
  std::optional<std::string> mu;
  std::optional<double> gamma;
  std::optional<std::string> family;
  std::optional<std::string> criterion;
  std::optional<std::string> sampler;
  std::optional<double> delta;
  std::optional<std::string> constant;
  std::optional<std::size_t> runs;
  std::optional<double> horizon;
  std::optional<std::string> loads;
};

void add_common(CLI::App* cmd, Overrides& o, bool bench) {
  cmd->add_option("--config", o.config_path, "JSON config file (version 1)");
  auto* seed = cmd->add_option("--seed", o.seed, "base RNG seed");
  if (bench) seed->required();
  cmd->add_option("--out", o.out, "CSV output path (default: stdout)");
  cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--summary", o.summary, "print a human-readable table to stderr");
  cmd->add_option("--constant", o.constant, "threshold constant C: auto or a number >= e");
  cmd->add_option("--delta", o.delta, "confidence parameter");
}

void add_instance(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--mu", o.mu, "slice loads, comma separated");
  cmd->add_option("--gamma", o.gamma, "admission threshold");
  cmd->add_option("--family", o.family, "bernoulli or poisson");
  cmd->add_option("--criterion", o.criterion, "any, packing or least-loaded");
}

mbac::ExperimentConfig resolve(const Overrides& o) {
  mbac::ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = mbac::load_config(o.config_path);
  if (o.seed) cfg.seed = o.seed;
  if (o.out) cfg.out = o.out;
  if (o.jobs) cfg.jobs = *o.jobs;
  if (o.constant) cfg.constant_c = mbac::parse_constant(*o.constant);
  if (o.delta) {
    if (!(*o.delta > 0.0 && *o.delta < 1.0)) {
      throw mbac::ValidationError("--delta: must lie in (0, 1)");
    }
    cfg.delta = *o.delta;
    cfg.packet.scenario.delta = *o.delta;
    cfg.flow.flow.delta = *o.delta;
  }
  if (o.criterion) {
    cfg.criteria = {mbac::parse_criterion(*o.criterion)};
    cfg.delta_sweep.criterion = cfg.criteria.front();
  }
  if (o.sampler) {
    cfg.samplers = {mbac::parse_sampler(*o.sampler)};
    cfg.delta_sweep.sampler = cfg.samplers.front();
    cfg.flow.sampler = cfg.samplers.front();
  }
  if (o.runs) {
    if (*o.runs < 1) throw mbac::ValidationError("--runs: must be >= 1");
    cfg.packet.scenario.runs = *o.runs;
    cfg.delta_sweep.scenario.runs = *o.runs;
  }
  if (o.horizon) {
    if (!(*o.horizon > 0.0)) throw mbac::ValidationError("--horizon: must be > 0");
    cfg.flow.flow.horizon = *o.horizon;
  }
  if (o.loads) cfg.flow.loads = mbac::parse_double_list(*o.loads);
  if (o.mu || o.gamma || o.family) {
    mbac::Instance inst = cfg.instance.value_or(mbac::Instance{});
    if (o.mu) inst.mu = mbac::parse_double_list(*o.mu);
    if (o.gamma) inst.gamma = *o.gamma;
    if (o.family) inst.family = mbac::parse_family(*o.family);
    cfg.instance = inst;
  }
  return cfg;
}

const mbac::Instance& require_instance(const mbac::ExperimentConfig& cfg) {
  if (!cfg.instance) {
    throw mbac::ValidationError(
        "instance: give --mu and --gamma or an 'instance' config section");
  }
  mbac::validate(*cfg.instance);
  return *cfg.instance;
}

template <typename Rows>
void emit(const mbac::ExperimentConfig& cfg, const Overrides& o,
          const Rows& rows) {
  if (cfg.out) {
    std::ofstream file(*cfg.out, std::ios::binary);
    if (!file) throw mbac::ValidationError("out: cannot open '" + *cfg.out + "'");
    mbac::write_csv(file, rows);
    if (!file.flush()) throw std::runtime_error("out: write failed");
  } else {
    mbac::write_csv(std::cout, rows);
  }
  if (o.summary) mbac::write_summary(std::cerr, rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measurement-based admission control for sliced networks"};
  app.require_subcommand(1);
  Overrides o;

  auto* lower = app.add_subcommand("lower-bound",
                                   "characteristic time and optimal weights");
  add_common(lower, o, false);
  add_instance(lower, o);

  auto* episode = app.add_subcommand("episode", "one measurement episode");
  add_common(episode, o, false);
  add_instance(episode, o);
  episode->add_option("--sampler", o.sampler, "tas or round-robin");

  auto* packet = app.add_subcommand("packet-bench",
                                    "measurement cost over random load instances");
  add_common(packet, o, true);
  packet->add_option("--criterion", o.criterion, "restrict to one criterion");
  packet->add_option("--sampler", o.sampler, "restrict to one sampler");
  packet->add_option("--runs", o.runs, "episodes per cell");

  auto* sweep = app.add_subcommand("delta-sweep",
                                   "measurement cost against the confidence");
  add_common(sweep, o, true);
  sweep->add_option("--criterion", o.criterion, "criterion");
  sweep->add_option("--sampler", o.sampler, "sampler");
  sweep->add_option("--runs", o.runs, "episodes per delta");

  auto* flow = app.add_subcommand("flow-bench", "flow-level simulation");
  add_common(flow, o, true);
  flow->add_option("--criterion", o.criterion, "restrict to one criterion");
  flow->add_option("--sampler", o.sampler, "sampler");
  flow->add_option("--horizon", o.horizon, "simulated time units");
  flow->add_option("--loads", o.loads, "system loads rho, comma separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    const auto cfg = resolve(o);
    const std::uint64_t seed = cfg.seed.value_or(0);
    if (lower->parsed()) {
      std::vector<mbac::LowerBoundRow> rows;
      for (auto crit : cfg.criteria) {
        rows.push_back(mbac::cmd_lower_bound(require_instance(cfg), crit, cfg.delta));
      }
      emit(cfg, o, rows);
    } else if (episode->parsed()) {
      std::vector<mbac::EpisodeRow> rows;
      for (auto crit : cfg.criteria) {
        for (auto sampler : cfg.samplers) {
          rows.push_back(mbac::cmd_episode(require_instance(cfg), crit, sampler,
                                           cfg.delta, cfg.constant_c, seed,
                                           cfg.max_slots));
        }
      }
      emit(cfg, o, rows);
    } else if (packet->parsed()) {
      emit(cfg, o, mbac::cmd_packet_bench(cfg.packet, cfg.criteria, cfg.samplers,
                                          cfg.constant_c, seed, cfg.jobs));
    } else if (sweep->parsed()) {
      emit(cfg, o, mbac::cmd_delta_sweep(cfg.delta_sweep, cfg.constant_c, seed,
                                         cfg.jobs));
    } else if (flow->parsed()) {
      emit(cfg, o, mbac::cmd_flow_bench(cfg.flow, cfg.criteria, cfg.constant_c,
                                        seed, cfg.jobs));
    }
  } catch (const mbac::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const mbac::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const mbac::AmbiguityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
