#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mbac/divergence.hpp"
#include "mbac/errors.hpp"
#include "mbac/oracle.hpp"
#include "mbac/rng.hpp"
#include "reference.hpp"

using namespace mbac;
using doctest::Approx;

namespace {

constexpr auto B = Family::Bernoulli;
constexpr auto P = Family::Poisson;
constexpr Criterion kCriteria[] = {Criterion::AnyAvailable, Criterion::Packing,
                                   Criterion::LeastLoaded};

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

// Random instance with distinct means, none equal to gamma.
Instance random_instance(Rng& rng, std::size_t K, Family f) {
  for (;;) {
    Instance inst{std::vector<double>(K), 0.0, f};
    for (double& m : inst.mu) {
      m = f == B ? 0.05 + 0.9 * rng.uniform() : 1.0 + 30.0 * rng.uniform();
    }
    inst.gamma = f == B ? 0.1 + 0.8 * rng.uniform() : 3.0 + 25.0 * rng.uniform();
    auto sorted = inst.mu;
    std::sort(sorted.begin(), sorted.end());
    bool ok = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    for (double m : inst.mu) ok = ok && std::abs(m - inst.gamma) > 1e-3;
    if (ok) return inst;
  }
}

std::vector<double> random_simplex(Rng& rng, std::size_t K) {
  std::vector<double> w(K);
  double total = 0.0;
  for (double& x : w) {
    x = -std::log(rng.uniform_pos());
    total += x;
  }
  for (double& x : w) x /= total;
  return w;
}

// The answer the reference closed forms describe: for any-available, the
// least-loaded available slice, which is the easiest one to certify.
Answer only_answer(const Instance& inst, Criterion crit) {
  const auto ok = correct_answers(inst, crit);
  if (crit != Criterion::AnyAvailable || ok.front().is_reject()) {
    return ok.front();
  }
  return *std::min_element(ok.begin(), ok.end(), [&](Answer a, Answer b) {
    return inst.mu[a.index()] < inst.mu[b.index()];
  });
}

}  // namespace

TEST_CASE("correct_answers") {
  const Instance none{{0.6, 0.7}, 0.5, B};
  for (auto c : kCriteria) {
    CHECK(correct_answers(none, c) == std::vector<Answer>{Answer::reject()});
  }
  const Instance inst{{0.1, 0.3, 0.7}, 0.5, B};
  CHECK(correct_answers(inst, Criterion::AnyAvailable) ==
        std::vector<Answer>{Answer::slice(0), Answer::slice(1)});
  CHECK(correct_answers(inst, Criterion::Packing) ==
        std::vector<Answer>{Answer::slice(1)});
  CHECK(correct_answers(inst, Criterion::LeastLoaded) ==
        std::vector<Answer>{Answer::slice(0)});
  CHECK(Answer::slice(1).value() == 2);
}

TEST_CASE("correct_answers rejects a tied target") {
  const Instance tie{{0.3, 0.3, 0.7}, 0.5, B};
  CHECK_THROWS_AS(correct_answers(tie, Criterion::Packing), AmbiguityError);
  CHECK_THROWS_AS(correct_answers(tie, Criterion::LeastLoaded), AmbiguityError);
  CHECK_THROWS_AS(oracle(tie, Criterion::Packing), AmbiguityError);
  CHECK(correct_answers(tie, Criterion::AnyAvailable).size() == 2);
  CHECK(correct_answers(tie, Criterion::Packing, TiePolicy::LowestIndex) ==
        std::vector<Answer>{Answer::slice(0)});
}

TEST_CASE("validate rejects invalid instances") {
  CHECK_THROWS_AS(validate(Instance{{}, 0.5, B}), ValidationError);
  CHECK_THROWS_AS(validate(Instance{{0.5, 0.2}, 0.5, B}), ValidationError);
  CHECK_THROWS_AS(validate(Instance{{1.2}, 0.5, B}), DomainError);
  CHECK_THROWS_AS(validate(Instance{{3.0}, -1.0, P}), DomainError);
}

TEST_CASE("oracle, no available slice") {
  const Instance inst{{0.6, 0.6}, 0.4, B};
  for (auto c : kCriteria) {
    const auto r = oracle(inst, c);
    CHECK(r.regime == Regime::NoAvailable);
    CHECK(r.weights[0] == Approx(0.5));
    CHECK(r.weights[1] == Approx(0.5));
    CHECK(r.characteristic_time ==
          Approx(2.0 / ref::kl_bernoulli(0.6, 0.4)).epsilon(1e-12));
    CHECK(r.characteristic_time == Approx(24.66303462376432).epsilon(1e-12));
    CHECK(r.easiest_answers == std::vector<Answer>{Answer::reject()});
  }
}

TEST_CASE("oracle, any available slice") {
  const Instance inst{{0.1, 0.6}, 0.4, B};
  const auto r = oracle(inst, Criterion::AnyAvailable);
  CHECK(r.characteristic_time == Approx(4.41912460482752).epsilon(1e-12));
  CHECK(r.weights == std::vector<double>{1.0, 0.0});
  CHECK(r.easiest_answers == std::vector<Answer>{Answer::slice(0)});
}

TEST_CASE("oracle, least loaded against a simplex grid") {
  const Instance inst{{0.15, 0.30, 0.70}, 0.5, B};
  const auto r = oracle(inst, Criterion::LeastLoaded);
  const auto grid = ref::grid_search3(true, inst.mu, inst.gamma,
                                      ref::Crit::Least, 0.005);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(r.weights[k] - grid.w[k]) <= 0.02);
  CHECK(1.0 / r.characteristic_time == Approx(grid.value).epsilon(0.02));
  CHECK(1.0 / r.characteristic_time >= grid.value * (1 - 1e-9));
}

TEST_CASE("oracle, packing with a single available slice") {
  const Instance inst{{0.3, 0.6, 0.8}, 0.5, B};
  const auto r = oracle(inst, Criterion::Packing);
  double T = 0.0;
  for (double m : inst.mu) T += 1.0 / ref::kl_bernoulli(m, 0.5);
  CHECK(r.characteristic_time == Approx(T).epsilon(1e-12));
  CHECK(r.weights[0] == Approx(1.0 / ref::kl_bernoulli(0.3, 0.5) / T));
  CHECK(r.easiest_answers == std::vector<Answer>{Answer::slice(0)});
}

TEST_CASE("oracle, least loaded with one slice") {
  const Instance inst{{0.3}, 0.5, B};
  const auto r = oracle(inst, Criterion::LeastLoaded);
  CHECK(r.weights == std::vector<double>{1.0});
  CHECK(r.characteristic_time ==
        Approx(1.0 / ref::kl_bernoulli(0.3, 0.5)).epsilon(1e-12));
}

TEST_CASE("oracle, packing capped by the threshold constraint") {
  // Packing target very close to gamma: d(mu*, gamma) < y*, so z* is the
  // threshold divergence.
  const Instance inst{{0.2, 0.49, 0.9}, 0.5, B};
  const auto r = oracle(inst, Criterion::Packing);
  REQUIRE(r.capped_equilibrium.has_value());
  CHECK(*r.capped_equilibrium == Approx(kl(B, 0.49, 0.5)).epsilon(1e-12));
  CHECK(*r.equilibrium > *r.capped_equilibrium);
  const double v = inner_value(inst, Criterion::Packing, Answer::slice(1),
                               r.weights);
  CHECK(v * r.characteristic_time == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("inner_value") {
  const Instance rej{{0.6, 0.8}, 0.4, B};
  const std::vector<double> uniform{0.5, 0.5};
  CHECK(inner_value(rej, Criterion::Packing, Answer::reject(), uniform) ==
        Approx(0.04054651081081644).epsilon(1e-12));

  const Instance inst{{0.1, 0.6}, 0.4, B};
  CHECK(inner_value(inst, Criterion::AnyAvailable, Answer::slice(0),
                    std::vector<double>{0.0, 1.0}) == 0.0);
  CHECK_THROWS_AS(inner_value(inst, Criterion::AnyAvailable, Answer::slice(1),
                              uniform),
                  ValidationError);
  CHECK_THROWS_AS(inner_value(inst, Criterion::AnyAvailable, Answer::slice(0),
                              std::vector<double>{1.0}),
                  ValidationError);
}

TEST_CASE("inner_value agrees with the reference closed forms") {
  Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    const Family f = i % 2 ? B : P;
    const auto inst = random_instance(rng, 2 + i % 5, f);
    const auto w = random_simplex(rng, inst.slices());
    for (auto c : kCriteria) {
      const double v = inner_value(inst, c, only_answer(inst, c), w);
      const double expected =
          ref::inner(f == B, inst.mu, inst.gamma, ref_crit(c), w);
      CHECK(v == Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("oracle properties on random instances") {
  Rng rng(22);
  for (int i = 0; i < 200; ++i) {
    const Family f = i % 2 ? B : P;
    const auto inst = random_instance(rng, 2 + i % 5, f);
    for (auto c : kCriteria) {
      CAPTURE(i);
      CAPTURE(static_cast<int>(c));
      const auto r = oracle(inst, c);
      const double sum = std::accumulate(r.weights.begin(), r.weights.end(), 0.0);
      CHECK(sum == Approx(1.0).epsilon(1e-9));
      for (double w : r.weights) CHECK(w >= 0.0);
      CHECK(r.characteristic_time > 0.0);

      const Answer a = only_answer(inst, c);
      const double best = inner_value(inst, c, a, r.weights);
      CHECK(std::abs(best * r.characteristic_time - 1.0) <= 1e-6);
      for (int s = 0; s < 500; ++s) {
        const auto w = random_simplex(rng, inst.slices());
        CHECK(best >= inner_value(inst, c, a, w) - 1e-6);
      }
      for (Answer e : r.easiest_answers) CHECK(is_correct(inst, c, e));
    }
  }
}

TEST_CASE("no load lies between the packing slice and gamma") {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    const auto inst = random_instance(rng, 2 + i % 5, i % 2 ? B : P);
    const Answer a = only_answer(inst, Criterion::Packing);
    if (a.is_reject()) continue;
    const double top = inst.mu[a.index()];
    for (double m : inst.mu) CHECK((m > top) == (m > inst.gamma));
  }
}

TEST_CASE("reject-regime weights equalize w_k d(mu_k, gamma)") {
  Rng rng(24);
  for (int i = 0; i < 100; ++i) {
    auto inst = random_instance(rng, 2 + i % 5, i % 2 ? B : P);
    const double lowest = *std::min_element(inst.mu.begin(), inst.mu.end());
    inst.gamma = lowest * 0.7;
    const auto r = oracle(inst, Criterion::LeastLoaded);
    REQUIRE(r.regime == Regime::NoAvailable);
    const double level = r.weights[0] * kl(inst.family, inst.mu[0], inst.gamma);
    for (std::size_t k = 1; k < inst.slices(); ++k) {
      CHECK(std::abs(r.weights[k] * kl(inst.family, inst.mu[k], inst.gamma) -
                     level) <= 1e-9);
    }
  }
}

TEST_CASE("weights are continuous in mu") {
  Rng rng(25);
  int probed = 0;
  for (int i = 0; i < 200 && probed < 100; ++i) {
    const auto inst = random_instance(rng, 3 + i % 3, i % 2 ? B : P);
    for (auto c : kCriteria) {
      Instance moved = inst;
      for (double& m : moved.mu) m += 1e-6 * (2 * rng.uniform() - 1);
      bool same_side = true;
      for (std::size_t k = 0; k < inst.slices(); ++k) {
        same_side = same_side && ((inst.mu[k] < inst.gamma) ==
                                  (moved.mu[k] < inst.gamma));
      }
      if (!same_side || only_answer(inst, c) != only_answer(moved, c)) continue;
      const auto a = oracle(inst, c).weights;
      const auto b = oracle(moved, c).weights;
      for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(std::abs(a[k] - b[k]) <= 1e-3);
      }
      ++probed;
    }
  }
  CHECK(probed >= 100);
}

TEST_CASE("online tie policy uses the small-gap limit weights") {
  const Instance tie{{0.3, 0.3, 0.3, 0.8}, 0.5, B};
  const auto r = oracle(tie, Criterion::LeastLoaded, TiePolicy::LowestIndex);
  CHECK(std::isinf(r.characteristic_time));
  const double each = 1.0 / std::sqrt(2.0);
  CHECK(r.weights[0] == Approx(1.0 / (1.0 + 2 * each)));
  CHECK(r.weights[1] == Approx(each / (1.0 + 2 * each)));
  CHECK(r.weights[3] == 0.0);
}

TEST_CASE("easiest_answer on running estimates") {
  const std::vector<double> mu{0.3, 0.2, 0.2, 0.45, 0.5};
  CHECK(easiest_answer(mu, 0.5, Criterion::AnyAvailable) == Answer::slice(1));
  CHECK(easiest_answer(mu, 0.5, Criterion::LeastLoaded) == Answer::slice(1));
  // 0.5 sits on the threshold and counts as unavailable.
  CHECK(easiest_answer(mu, 0.5, Criterion::Packing) == Answer::slice(3));
  CHECK(easiest_answer(mu, 0.1, Criterion::Packing) == Answer::reject());
}

TEST_CASE("criterion names") {
  CHECK(parse_criterion("any") == Criterion::AnyAvailable);
  CHECK(parse_criterion("packing") == Criterion::Packing);
  CHECK(parse_criterion("least-loaded") == Criterion::LeastLoaded);
  CHECK_THROWS_AS(parse_criterion("fastest"), ValidationError);
}
