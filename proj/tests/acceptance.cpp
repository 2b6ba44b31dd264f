// Acceptance runner: `acceptance N` checks criterion N (1-9), prints one
// "ACCEPTANCE N PASS|FAIL: detail" line and exits nonzero on FAIL.
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mbac/divergence.hpp"
#include "mbac/flowsim.hpp"
#include "mbac/glr.hpp"
#include "mbac/harness.hpp"
#include "mbac/oracle.hpp"
#include "mbac/rng.hpp"
#include "mbac/tas.hpp"
#include "reference.hpp"

using namespace mbac;

namespace {

constexpr Criterion kCriteria[] = {Criterion::AnyAvailable, Criterion::Packing,
                                   Criterion::LeastLoaded};

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

ref::Crit ref_crit(Criterion c) {
  switch (c) {
    case Criterion::AnyAvailable:
      return ref::Crit::Any;
    case Criterion::Packing:
      return ref::Crit::Packing;
    case Criterion::LeastLoaded:
      return ref::Crit::Least;
  }
  return ref::Crit::Any;
}

// K=3 Bernoulli instance with well separated means and gamma.
Instance random_instance3(Rng& rng) {
  for (;;) {
    Instance inst{{0.05 + 0.9 * rng.uniform(), 0.05 + 0.9 * rng.uniform(),
                   0.05 + 0.9 * rng.uniform()},
                  0.15 + 0.7 * rng.uniform(), Family::Bernoulli};
    auto all = inst.mu;
    all.push_back(inst.gamma);
    std::sort(all.begin(), all.end());
    bool ok = true;
    for (std::size_t i = 1; i < all.size(); ++i) ok = ok && all[i] - all[i - 1] > 0.03;
    if (ok) return inst;
  }
}

EmpiricalState state_with(const std::vector<std::uint64_t>& n,
                          const std::vector<double>& mu) {
  EmpiricalState s(n.size());
  for (std::size_t k = 0; k < n.size(); ++k) {
    for (std::uint64_t i = 0; i < n[k]; ++i) s.record(k, mu[k]);
  }
  return s;
}

Verdict criterion1() {
  const Instance inst{{0.2, 0.45, 0.7}, 0.5, Family::Bernoulli};
  const auto cfg = default_threshold(0.1, 3);
  const int episodes = 2000;
  double worst = 0.0;
  std::string detail;
  for (auto c : kCriteria) {
    int wrong = 0;
    double taus = 0;
    for (int i = 0; i < episodes; ++i) {
      const auto r = run_episode(inst, c, cfg, Sampler::TrackAndStop,
                                 derive_seed(1, {std::uint64_t(i)}));
      wrong += !r.correct;
      taus += static_cast<double>(r.tau);
    }
    const double rate = static_cast<double>(wrong) / episodes;
    worst = std::max(worst, rate);
    detail += std::string(to_string(c)) + " error " + fmt(rate) + " (mean tau " +
              fmt(taus / episodes) + "); ";
  }
  return {worst <= 0.1, detail + "bound 0.1"};
}

Verdict criterion2() {
  Rng rng(2);
  double worst_w = 0.0;
  double worst_t = 0.0;
  for (auto c : kCriteria) {
    for (int i = 0; i < 20; ++i) {
      const auto inst = random_instance3(rng);
      const auto r = oracle(inst, c);
      const auto grid = ref::grid_search3(true, inst.mu, inst.gamma, ref_crit(c), 0.005);
      for (int k = 0; k < 3; ++k) {
        worst_w = std::max(worst_w, std::abs(r.weights[k] - grid.w[k]));
      }
      const double inv_t = 1.0 / r.characteristic_time;
      worst_t = std::max(worst_t, std::abs(inv_t - grid.value) / grid.value);
    }
  }
  return {worst_w <= 0.02 && worst_t <= 0.02,
          "max |w - w_grid| " + fmt(worst_w) + " (<= 0.02), max rel 1/T gap " +
              fmt(worst_t) + " (<= 0.02) over 60 instances"};
}

Verdict criterion3() {
  Rng rng(3);
  const std::uint64_t t = 100'000;
  double lo = 1e300;
  double hi = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto inst = random_instance3(rng);
    const auto c = kCriteria[i % 3];
    const auto r = oracle(inst, c);
    std::vector<std::uint64_t> n(3);
    for (int k = 0; k < 3; ++k) {
      n[k] = std::llround(static_cast<double>(t) * r.weights[k]);
    }
    const auto s = state_with(n, inst.mu);
    const double q = glr_statistic(s, inst.gamma, inst.family, c,
                                   r.easiest_answers.front());
    const double ratio = q / static_cast<double>(t) * r.characteristic_time;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {lo >= 0.95 && hi <= 1.05,
          "Q(t) T / t in [" + fmt(lo, 8) + ", " + fmt(hi, 8) + "] on 50 instances"};
}

Verdict criterion4() {
  Rng rng(4);
  double worst_f = 0.0;
  double worst_g = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Family f = i % 2 ? Family::Poisson : Family::Bernoulli;
    const std::size_t K = 2 + rng.below(5);
    std::vector<double> mu(K);
    for (double& m : mu) {
      m = f == Family::Bernoulli ? 0.02 + 0.96 * rng.uniform() : 0.5 + 40 * rng.uniform();
    }
    const std::size_t target = rng.below(K);
    const bool above = rng.uniform() < 0.5;
    std::vector<std::size_t> comps;
    for (std::size_t j = 0; j < K; ++j) {
      if (j == target) continue;
      if ((mu[j] > mu[target]) == above && mu[j] != mu[target]) comps.push_back(j);
    }
    if (comps.empty()) {
      --i;
      continue;
    }
    const double y = equilibrium_root(f, mu, target, comps);
    worst_f = std::max(worst_f, std::abs(equilibrium_value(f, mu, target, comps, y) - 1.0));
    for (std::size_t j : comps) {
      const double sup = kl(f, mu[target], mu[j]);
      const double yy = sup * rng.uniform();
      const double x = info_deviation_inverse(f, mu[target], mu[j], yy);
      worst_g = std::max(worst_g, std::abs(info_deviation(f, mu[target], mu[j], x) - yy));
    }
  }
  return {worst_f <= 1e-9 && worst_g <= 1e-9,
          "max |F(y*) - 1| " + fmt(worst_f) + ", max |g(x(y)) - y| " + fmt(worst_g) +
              " on 1000 inputs (tolerance 1e-9)"};
}

Verdict criterion5() {
  DeltaSweepConfig cfg;
  cfg.instance = Instance{{19.0, 22.0, 36.0, 43.0}, 24.0, Family::Poisson};
  cfg.scenario.runs = 50;
  cfg.deltas = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  cfg.criterion = Criterion::Packing;
  const auto rows = cmd_delta_sweep(cfg, std::numbers::e, 5, 1);
  bool monotone = true;
  std::string detail = "C = e, ratios";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    detail += " " + fmt(rows[i].ratio);
    if (i > 0) {
      // Ratio CI radius is the tau CI radius over the lower bound.
      const double slack = rows[i - 1].ci_radius / rows[i - 1].lower_bound +
                           rows[i].ci_radius / rows[i].lower_bound;
      monotone = monotone && rows[i].ratio <= rows[i - 1].ratio + slack;
    }
  }
  const double last = rows.back().ratio;
  // Same sweep point with the computed constant, for reference only.
  DeltaSweepConfig computed = cfg;
  computed.deltas = {1e-6};
  const auto auto_rows = cmd_delta_sweep(computed, std::nullopt, 5, 1);
  detail += "; nonincreasing within CI: " + std::string(monotone ? "yes" : "no") +
            "; ratio at 1e-6 " + fmt(last) + " (<= 2.5); computed C gives " +
            fmt(auto_rows.front().ratio) + " at 1e-6";
  return {monotone && last <= 2.5, detail};
}

Verdict criterion6() {
  PacketBenchConfig cfg;
  cfg.scenario.slices = 4;
  cfg.scenario.runs = 100;
  cfg.scenario.delta = 0.01;
  const auto rows = cmd_packet_bench(cfg, {std::begin(kCriteria), std::end(kCriteria)},
                                     {Sampler::TrackAndStop, Sampler::RoundRobin},
                                     std::nullopt, 6, 1);
  bool pass = true;
  std::string detail = "TaS / uniform mean tau:";
  for (const auto& tas : rows) {
    if (tas.sampler != Sampler::TrackAndStop) continue;
    for (const auto& rr : rows) {
      if (rr.sampler != Sampler::RoundRobin || rr.load != tas.load ||
          rr.criterion != tas.criterion) {
        continue;
      }
      const double ratio = tas.mean_tau / rr.mean_tau;
      pass = pass && ratio <= 0.67;
      detail += " " + std::string(to_string(tas.load)) + "/" +
                std::string(to_string(tas.criterion)) + " " + fmt(ratio, 3);
    }
  }
  return {pass, detail + " (each <= 0.67)"};
}

Verdict criterion7() {
  FlowConfig cfg;
  cfg.rate_support = {6};  // floor(15.5 / 6) = 2 flows per slice, 3 slices
  cfg.arrival_rate = 3.0;  // unit mean holding time: 3 Erlangs
  cfg.horizon = 1e5;
  cfg.seed = 7;
  cfg.admission = AdmissionMode::PerfectInformation;
  const auto s = simulate_flows(cfg, Criterion::AnyAvailable, Sampler::TrackAndStop);
  const double expected = ref::erlang_b(6, 3.0);
  const double gap = std::abs(s.blocking() - expected);
  return {gap <= 0.01, "blocking " + fmt(s.blocking(), 5) + " +- " +
                           fmt(s.blocking_ci_radius(), 3) + " vs Erlang-B(6, 3) " +
                           fmt(expected, 5) + ", gap " + fmt(gap, 3) + " (<= 0.01)"};
}

Verdict criterion8() {
  const int seeds = 10;
  const double horizon = 100.0;
  bool pass = true;
  std::string detail;
  for (double rho : {0.6, 0.8}) {
    int block_wins = 0;
    int pack_over_least = 0;
    int least_over_any = 0;
    double block[3] = {0, 0, 0};
    double meas[3] = {0, 0, 0};
    for (int s = 0; s < seeds; ++s) {
      FlowConfig cfg;
      cfg.horizon = horizon;
      cfg.seed = derive_seed(8, {std::uint64_t(rho * 10), std::uint64_t(s)});
      cfg.arrival_rate = arrival_rate_for_load(cfg, rho);
      FlowSimStats st[3];
      for (int c = 0; c < 3; ++c) {
        st[c] = simulate_flows(cfg, kCriteria[c], Sampler::TrackAndStop);
        block[c] += st[c].blocking() / seeds;
        meas[c] += st[c].mean_measurements() / seeds;
      }
      block_wins += st[0].blocking() > st[1].blocking();
      pack_over_least += st[1].mean_measurements() > st[2].mean_measurements();
      least_over_any += st[2].mean_measurements() > st[0].mean_measurements();
    }
    const double p_block = ref::sign_test_p(block_wins, seeds);
    const double p_pl = ref::sign_test_p(pack_over_least, seeds);
    const double p_la = ref::sign_test_p(least_over_any, seeds);
    pass = pass && p_block < 0.05 && p_pl < 0.05 && p_la < 0.05;
    detail += "rho " + fmt(rho, 2) + ": blocking any/packing/least " + fmt(block[0], 3) +
              "/" + fmt(block[1], 3) + "/" + fmt(block[2], 3) + " (any>packing " +
              std::to_string(block_wins) + "/10, p " + fmt(p_block, 3) +
              "), measurements " + fmt(meas[0], 4) + "/" + fmt(meas[1], 4) + "/" +
              fmt(meas[2], 4) + " (packing>least " + std::to_string(pack_over_least) +
              "/10, least>any " + std::to_string(least_over_any) + "/10); ";
  }
  return {pass, detail + "sign test at 95%"};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool run_cli(const std::string& args, const std::string& out) {
  const std::string cmd =
      std::string(MBAC_CLI_PATH) + " " + args + " --out " + out + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) && WEXITSTATUS(status) == 0;
}

Verdict criterion9() {
  const std::vector<std::string> commands{
      "packet-bench --seed 11 --runs 5",
      "delta-sweep --seed 11 --runs 3",
      "flow-bench --seed 11 --horizon 5 --loads 0.6,0.8",
  };
  bool pass = true;
  std::string detail;
  for (const auto& args : commands) {
    const std::string a = "acceptance9_a.csv";
    const std::string b = "acceptance9_b.csv";
    const bool ok = run_cli(args, a) && run_cli(args + " --jobs 3", b);
    const std::string ta = slurp(a);
    const bool same = ok && !ta.empty() && ta == slurp(b);
    pass = pass && same;
    detail += args.substr(0, args.find(' ')) + (same ? " identical; " : " DIFFERS; ");
    std::remove(a.c_str());
    std::remove(b.c_str());
  }
  return {pass, detail + "reruns with 1 and 3 jobs"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance <1-9>\n";
    return 2;
  }
  const int n = std::atoi(argv[1]);
  Verdict (*const checks[])() = {criterion1, criterion2, criterion3,
                                 criterion4, criterion5, criterion6,
                                 criterion7, criterion8, criterion9};
  if (n < 1 || n > 9) {
    std::cerr << "criterion must be 1-9\n";
    return 2;
  }
  Verdict v;
  try {
    v = checks[n - 1]();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  std::cout << "ACCEPTANCE " << n << (v.pass ? " PASS: " : " FAIL: ") << v.detail
            << std::endl;
  return v.pass ? 0 : 1;
}
