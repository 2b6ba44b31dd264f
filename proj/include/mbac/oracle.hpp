#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mbac/divergence.hpp"

namespace mbac {

enum class Criterion { AnyAvailable, Packing, LeastLoaded };

std::string_view to_string(Criterion criterion);
Criterion parse_criterion(std::string_view text);

/// Decision of one admission episode: reject the flow, or admit it on a
/// slice. Slices are numbered 1..K in answers and 0..K-1 in vectors.
class Answer {
 public:
  constexpr Answer() = default;
  static constexpr Answer reject() { return Answer(0); }
  static constexpr Answer slice(std::size_t index) { return Answer(index + 1); }
  static constexpr Answer from_value(std::size_t value) { return Answer(value); }

  constexpr bool is_reject() const { return value_ == 0; }
  /// Zero-based slice index; only meaningful when !is_reject().
  constexpr std::size_t index() const { return value_ - 1; }
  constexpr std::size_t value() const { return value_; }

  friend constexpr auto operator<=>(Answer, Answer) = default;

 private:
  constexpr explicit Answer(std::size_t value) : value_(value) {}
  std::size_t value_ = 0;
};

std::string to_string(Answer answer);

/// Ground truth of one decision episode.
struct Instance {
  std::vector<double> mu;  // mean load per slice, packets/slot
  double gamma = 0.0;      // admission threshold
  Family family = Family::Bernoulli;

  std::size_t slices() const { return mu.size(); }
};

/// Throws ValidationError/DomainError unless K >= 1, every mean is in the
/// family's domain, gamma is in the domain and no mean equals gamma.
void validate(const Instance& inst);

enum class Regime { NoAvailable, Available };

struct OracleResult {
  double characteristic_time = 0.0;
  std::vector<double> weights;
  std::vector<Answer> easiest_answers;
  Regime regime = Regime::NoAvailable;
  /// Root of the equilibrium equation and its capped value
  /// z = min(d(target, gamma), y) when the criterion needed one.
  std::optional<double> equilibrium;
  std::optional<double> capped_equilibrium;
};

/// How a tied packing / least-loaded target is handled.
enum class TiePolicy {
  Throw,         // AmbiguityError, for ground-truth instances
  LowestIndex,   // running estimates: pick the lowest index, use limit weights
};

std::vector<Answer> correct_answers(const Instance& inst, Criterion crit,
                                    TiePolicy ties = TiePolicy::Throw);

/// True when `answer` is correct for the instance; a tied target counts as
/// correct for every slice in the tie.
bool is_correct(const Instance& inst, Criterion crit, Answer answer);

/// Characteristic time and optimal measurement proportions.
OracleResult oracle(const Instance& inst, Criterion crit,
                    TiePolicy ties = TiePolicy::Throw);

/// inf over Alt(answer) of sum_k w_k d(mu_k, lambda_k), via the closed forms
/// of the alternative-set decomposition.
double inner_value(const Instance& inst, Criterion crit, Answer answer,
                   std::span<const double> w);

/// Easiest answer min C*(mu) for (possibly clamped) running estimates.
/// Means equal to gamma count as unavailable and ties go to the lowest index.
Answer easiest_answer(std::span<const double> mu, double gamma, Criterion crit);

namespace detail {

/// Shared closed form for the infimum over Alt(answer) of
/// sum_k w_k d(mu_k, lambda_k). `w` may be proportions or raw counts.
/// Comparator arms tied with the target contribute 0.
double alternative_infimum(Family family, std::span<const double> mu,
                           double gamma, Criterion crit, Answer answer,
                           std::span<const double> w);

}  // namespace detail

}  // namespace mbac
