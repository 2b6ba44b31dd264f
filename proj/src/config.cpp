#include "mbac/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "mbac/errors.hpp"

namespace mbac {

namespace {

using nlohmann::json;

// Rejects keys outside `allowed` so that typos do not silently fall back to
// defaults.
void check_keys(const json& obj, std::string_view where,
                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) {
    throw ValidationError(std::string(where) + ": expected an object");
  }
  for (const auto& item : obj.items()) {
    bool known = false;
    for (auto key : allowed) known = known || item.key() == key;
    if (!known) {
      throw ValidationError(std::string(where) + "." + item.key() +
                            ": unknown key");
    }
  }
}

std::string path(std::string_view where, std::string_view key) {
  return std::string(where) + "." + std::string(key);
}

template <typename T>
T get(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ValidationError(key + ": wrong type");
  }
}

double get_positive(const json& value, const std::string& key) {
  const double x = get<double>(value, key);
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw ValidationError(key + ": must be a positive number");
  }
  return x;
}

std::size_t get_count(const json& value, const std::string& key) {
  if (!value.is_number_integer() || value.get<long long>() < 1) {
    throw ValidationError(key + ": must be an integer >= 1");
  }
  return value.get<std::size_t>();
}

std::uint64_t get_u64(const json& value, const std::string& key) {
  if (!value.is_number_unsigned() && !(value.is_number_integer() &&
                                       value.get<long long>() >= 0)) {
    throw ValidationError(key + ": must be a nonnegative integer");
  }
  return value.get<std::uint64_t>();
}

double get_delta(const json& value, const std::string& key) {
  const double d = get<double>(value, key);
  if (!(d > 0.0 && d < 1.0)) {
    throw ValidationError(key + ": must lie in (0, 1)");
  }
  return d;
}

template <typename T, typename Parse>
std::vector<T> get_list(const json& value, const std::string& key,
                        Parse parse) {
  if (!value.is_array() || value.empty()) {
    throw ValidationError(key + ": expected a non-empty array");
  }
  std::vector<T> out;
  for (const auto& item : value) out.push_back(parse(item, key));
  return out;
}

Criterion criterion_of(const json& v, const std::string& key) {
  return parse_criterion(get<std::string>(v, key));
}

Sampler sampler_of(const json& v, const std::string& key) {
  return parse_sampler(get<std::string>(v, key));
}

ConstantChoice constant_of(const json& v, const std::string& key) {
  if (v.is_string()) {
    try {
      return parse_constant(v.get<std::string>());
    } catch (const ValidationError& e) {
      throw ValidationError(key + ": " + e.what());
    }
  }
  const double c = get<double>(v, key);
  if (!(c >= std::exp(1.0))) throw ValidationError(key + ": must be >= e");
  return c;
}

Instance instance_of(const json& v, const std::string& key) {
  check_keys(v, key, {"mu", "gamma", "family"});
  if (!v.contains("mu") || !v.contains("gamma")) {
    throw ValidationError(key + ": needs 'mu' and 'gamma'");
  }
  Instance inst;
  inst.mu = get_list<double>(v.at("mu"), path(key, "mu"),
                             [](const json& x, const std::string& k) {
                               return get<double>(x, k);
                             });
  inst.gamma = get<double>(v.at("gamma"), path(key, "gamma"));
  if (v.contains("family")) {
    inst.family =
        parse_family(get<std::string>(v.at("family"), path(key, "family")));
  }
  try {
    validate(inst);
  } catch (const std::exception& e) {
    throw ValidationError(key + ": " + e.what());
  }
  return inst;
}

// Scenario keys shared by the packet bench and the delta sweep.
void read_scenario(const json& v, const std::string& where,
                   PacketScenario& s) {
  if (v.contains("slices")) s.slices = get_count(v.at("slices"), path(where, "slices"));
  if (v.contains("gamma")) s.gamma = get_positive(v.at("gamma"), path(where, "gamma"));
  if (v.contains("runs")) s.runs = get_count(v.at("runs"), path(where, "runs"));
  if (v.contains("delta")) s.delta = get_delta(v.at("delta"), path(where, "delta"));
  if (v.contains("family")) {
    s.family = parse_family(get<std::string>(v.at("family"), path(where, "family")));
  }
}

void read_packet(const json& v, PacketBenchConfig& cfg) {
  const std::string where = "packet";
  check_keys(v, where, {"slices", "gamma", "runs", "delta", "family", "loads"});
  read_scenario(v, where, cfg.scenario);
  if (v.contains("loads")) {
    cfg.loads = get_list<LoadLevel>(
        v.at("loads"), path(where, "loads"),
        [](const json& x, const std::string& k) {
          return parse_load_level(get<std::string>(x, k));
        });
  }
  validate(cfg.scenario);
}

void read_delta_sweep(const json& v, DeltaSweepConfig& cfg) {
  const std::string where = "delta_sweep";
  check_keys(v, where, {"slices", "gamma", "runs", "family", "load", "deltas",
                        "criterion", "sampler", "instance"});
  read_scenario(v, where, cfg.scenario);
  if (v.contains("load")) {
    cfg.scenario.load =
        parse_load_level(get<std::string>(v.at("load"), path(where, "load")));
  }
  if (v.contains("deltas")) {
    cfg.deltas = get_list<double>(v.at("deltas"), path(where, "deltas"),
                                  [](const json& x, const std::string& k) {
                                    return get_delta(x, k);
                                  });
  }
  if (v.contains("criterion")) {
    cfg.criterion = criterion_of(v.at("criterion"), path(where, "criterion"));
  }
  if (v.contains("sampler")) {
    cfg.sampler = sampler_of(v.at("sampler"), path(where, "sampler"));
  }
  if (v.contains("instance")) {
    cfg.instance = instance_of(v.at("instance"), path(where, "instance"));
  }
  validate(cfg.scenario);
}

void read_flow(const json& v, FlowBenchConfig& cfg) {
  const std::string where = "flow";
  check_keys(v, where, {"slices", "capacity", "rates", "loads", "mean_duration",
                        "delta", "horizon", "slot_duration", "batches",
                        "sampler", "admission", "max_slots"});
  FlowConfig& f = cfg.flow;
  if (v.contains("slices")) f.slices = get_count(v.at("slices"), path(where, "slices"));
  if (v.contains("capacity")) {
    f.capacity = get_positive(v.at("capacity"), path(where, "capacity"));
  }
  if (v.contains("rates")) {
    f.rate_support = get_list<int>(v.at("rates"), path(where, "rates"),
                                   [](const json& x, const std::string& k) {
                                     return static_cast<int>(get_count(x, k));
                                   });
  }
  if (v.contains("loads")) {
    cfg.loads = get_list<double>(v.at("loads"), path(where, "loads"),
                                 [](const json& x, const std::string& k) {
                                   return get_positive(x, k);
                                 });
  }
  if (v.contains("mean_duration")) {
    f.mean_duration = get_positive(v.at("mean_duration"), path(where, "mean_duration"));
  }
  if (v.contains("delta")) f.delta = get_delta(v.at("delta"), path(where, "delta"));
  if (v.contains("horizon")) {
    f.horizon = get_positive(v.at("horizon"), path(where, "horizon"));
  }
  if (v.contains("slot_duration")) {
    f.slot_duration = get<double>(v.at("slot_duration"), path(where, "slot_duration"));
  }
  if (v.contains("batches")) f.batches = get_count(v.at("batches"), path(where, "batches"));
  if (v.contains("max_slots")) {
    f.max_slots_per_decision = get_count(v.at("max_slots"), path(where, "max_slots"));
  }
  if (v.contains("sampler")) {
    cfg.sampler = sampler_of(v.at("sampler"), path(where, "sampler"));
  }
  if (v.contains("admission")) {
    const auto mode = get<std::string>(v.at("admission"), path(where, "admission"));
    if (mode == "measured") {
      f.admission = AdmissionMode::Measured;
    } else if (mode == "perfect") {
      f.admission = AdmissionMode::PerfectInformation;
    } else {
      throw ValidationError("flow.admission: expected 'measured' or 'perfect'");
    }
  }
  validate(f);
}

}  // namespace

ConstantChoice parse_constant(const std::string& text) {
  if (text == "auto") return std::nullopt;
  double c = 0.0;
  std::istringstream in(text);
  if (!(in >> c) || !in.eof()) {
    throw ValidationError("constant: expected 'auto' or a number, got '" +
                          text + "'");
  }
  if (!(c >= std::exp(1.0))) throw ValidationError("constant: must be >= e");
  return c;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    std::istringstream num(field);
    double x = 0.0;
    if (!(num >> x) || !(num >> std::ws).eof()) {
      throw ValidationError("expected a comma-separated list of numbers, got '" +
                            text + "'");
    }
    out.push_back(x);
  }
  if (out.empty()) throw ValidationError("empty number list");
  return out;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: not valid JSON: ") + e.what());
  }
  check_keys(doc, "config",
             {"version", "seed", "jobs", "out", "threshold_constant", "delta",
              "criteria", "samplers", "instance", "max_slots", "packet",
              "delta_sweep", "flow"});
  if (!doc.contains("version")) throw ValidationError("version: missing");
  if (!doc.at("version").is_number_integer() ||
      doc.at("version").get<int>() != kConfigVersion) {
    throw ValidationError("version: only version " +
                          std::to_string(kConfigVersion) + " is supported");
  }

  ExperimentConfig cfg;
  if (doc.contains("seed")) cfg.seed = get_u64(doc.at("seed"), "seed");
  if (doc.contains("jobs")) cfg.jobs = get_count(doc.at("jobs"), "jobs");
  if (doc.contains("out")) cfg.out = get<std::string>(doc.at("out"), "out");
  if (doc.contains("threshold_constant")) {
    cfg.constant_c = constant_of(doc.at("threshold_constant"), "threshold_constant");
  }
  if (doc.contains("delta")) cfg.delta = get_delta(doc.at("delta"), "delta");
  if (doc.contains("criteria")) {
    cfg.criteria = get_list<Criterion>(doc.at("criteria"), "criteria", criterion_of);
  }
  if (doc.contains("samplers")) {
    cfg.samplers = get_list<Sampler>(doc.at("samplers"), "samplers", sampler_of);
  }
  if (doc.contains("instance")) cfg.instance = instance_of(doc.at("instance"), "instance");
  if (doc.contains("max_slots")) cfg.max_slots = get_count(doc.at("max_slots"), "max_slots");
  if (doc.contains("packet")) read_packet(doc.at("packet"), cfg.packet);
  if (doc.contains("delta_sweep")) read_delta_sweep(doc.at("delta_sweep"), cfg.delta_sweep);
  if (doc.contains("flow")) read_flow(doc.at("flow"), cfg.flow);
  return cfg;
}

ExperimentConfig load_config(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("config: cannot open '" + file + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace mbac
