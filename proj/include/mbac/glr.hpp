#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mbac/divergence.hpp"
#include "mbac/oracle.hpp"

namespace mbac {

/// Per-slice measurement counts and running means after t measurements.
class EmpiricalState {
 public:
  explicit EmpiricalState(std::size_t slices)
      : counts_(slices, 0), sums_(slices, 0.0), means_(slices, 0.0) {}

  /// Means are kept as sum / n rather than updated incrementally: with
  /// integer observations equal empirical means are then bit-identical,
  /// which the tie handling relies on.
  void record(std::size_t slice, double observation) {
    const auto n = ++counts_[slice];
    sums_[slice] += observation;
    means_[slice] = sums_[slice] / static_cast<double>(n);
    ++t_;
  }

  std::size_t slices() const { return counts_.size(); }
  std::uint64_t t() const { return t_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  /// Raw running means (0 for unmeasured slices).
  const std::vector<double>& means() const { return means_; }
  /// Running means clamped into the family's open domain.
  std::vector<double> clamped_means(Family family) const;

 private:
  std::vector<std::uint64_t> counts_;
  std::vector<double> sums_;
  std::vector<double> means_;
  std::uint64_t t_ = 0;
};

struct ThresholdConfig {
  double delta = 0.01;
  double constant_c = 2.718281828459045;
};

/// Exploration threshold f(t) = log(C t^2 / delta).
double threshold(const ThresholdConfig& cfg, std::uint64_t t);

/// Smallest practical C satisfying
///   C >= e * sum_{t>=1} (e/K)^K (log(C t^2) log t)^K / t^2,
/// found by fixed-point iteration and cached per K.
double compute_constant(std::size_t slices);

/// Upper bound on the series above for a given C: exact sum up to
/// `terms`, plus an integral tail bound and the tail's peak term.
double constant_series_bound(std::size_t slices, double constant_c,
                             std::uint64_t terms = 1'000'000);

/// ThresholdConfig with the computed constant for K slices.
ThresholdConfig default_threshold(double delta, std::size_t slices);

/// GLR stopping statistic Q: infimum over instances where `candidate` is
/// wrong of sum_k n_k d(mu_hat_k, lambda_k).
double glr_statistic(const EmpiricalState& state, double gamma, Family family,
                     Criterion crit, Answer candidate);

}  // namespace mbac
