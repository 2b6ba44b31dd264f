#include "mbac/glr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "mbac/errors.hpp"

namespace mbac {

namespace {

constexpr std::size_t kMaxSlicesForConstant = 64;

// Streaming log-sum-exp accumulator.
class LogSum {
 public:
  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term > max_) {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    } else {
      sum_ += std::exp(log_term - max_);
    }
  }
  double value() const {
    if (sum_ == 0.0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

// log of the series summand as a function of u = log t.
double log_summand(double K, double log_c, double u) {
  if (u <= 0.0) return -std::numeric_limits<double>::infinity();
  return K * (1.0 - std::log(K)) + K * std::log((log_c + 2.0 * u) * u) -
         2.0 * u;
}

// log of the upper bound on sum_{t >= 1} (e/K)^K (log(C t^2) log t)^K / t^2.
double log_series_bound(std::size_t slices, double log_c, std::uint64_t terms) {
  const double K = static_cast<double>(slices);
  LogSum total;
  for (std::uint64_t t = 2; t <= terms; ++t) {
    total.add(log_summand(K, log_c, std::log(static_cast<double>(t))));
  }

  // Tail: with u = log x the integrand becomes ((L + 2u) u)^K e^{-u}; expand
  // the binomial and use Gamma(n+1, U) = n! e^{-U} sum_j U^j / j!.
  const double U = std::log(static_cast<double>(terms));
  const int k = static_cast<int>(slices);
  for (int i = 0; i <= k; ++i) {
    const int n = k + i;
    LogSum incomplete;
    for (int j = 0; j <= n; ++j) {
      incomplete.add(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) +
                     j * std::log(U));
    }
    const double log_binom =
        std::lgamma(k + 1.0) - std::lgamma(i + 1.0) - std::lgamma(k - i + 1.0);
    const double log_coeff = log_binom + (k - i) * std::log(log_c) +
                             i * std::numbers::ln2;
    total.add(K * (1.0 - std::log(K)) + log_coeff + incomplete.value() - U);
  }

  // Sum over t > N is at most the integral from N plus the largest summand
  // on [N, inf); the summand is unimodal in u.
  auto dlog = [&](double u) {
    return K * (2.0 / (log_c + 2.0 * u) + 1.0 / u) - 2.0;
  };
  double peak_u = U;
  if (dlog(U) > 0.0) {
    double lo = U;
    double hi = U + 1.0;
    while (dlog(hi) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (dlog(mid) > 0.0 ? lo : hi) = mid;
    }
    peak_u = lo;
  }
  total.add(log_summand(K, log_c, peak_u));
  return total.value();
}

}  // namespace

std::vector<double> EmpiricalState::clamped_means(Family family) const {
  std::vector<double> out(means_.size());
  for (std::size_t k = 0; k < means_.size(); ++k) {
    out[k] = clamp_mean(family, means_[k]);
  }
  return out;
}

double threshold(const ThresholdConfig& cfg, std::uint64_t t) {
  const double tt = static_cast<double>(std::max<std::uint64_t>(t, 1));
  return std::log(cfg.constant_c) + 2.0 * std::log(tt) - std::log(cfg.delta);
}

double constant_series_bound(std::size_t slices, double constant_c,
                             std::uint64_t terms) {
  if (slices == 0 || slices > kMaxSlicesForConstant) {
    throw ValidationError("compute_constant: K must lie in 1..64");
  }
  return std::exp(log_series_bound(slices, std::log(constant_c), terms));
}

double compute_constant(std::size_t slices) {
  if (slices == 0 || slices > kMaxSlicesForConstant) {
    throw ValidationError("compute_constant: K must lie in 1..64");
  }
  static std::mutex mutex;
  static std::map<std::size_t, double> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(slices); it != cache.end()) return it->second;
  }

  constexpr std::uint64_t kTerms = 1'000'000;
  const double K = static_cast<double>(slices);
  // Fixed point in log space: L <- 1 + log S(e^L), seeded at C0 = e K^K.
  double log_c = 1.0 + K * std::log(K);
  bool converged = false;
  for (int iter = 0; iter < 200; ++iter) {
    const double next = 1.0 + log_series_bound(slices, log_c, kTerms);
    const double change = std::abs(next - log_c);
    log_c = next;
    if (change < 1e-4) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError("compute_constant: no fixed point");
  // Step up until the inequality holds with the bound on the right.
  while (log_c < 1.0 + log_series_bound(slices, log_c, kTerms)) log_c += 1e-4;
  const double c = std::max(std::exp(log_c), std::numbers::e);

  std::lock_guard lock(mutex);
  cache.emplace(slices, c);
  return c;
}

ThresholdConfig default_threshold(double delta, std::size_t slices) {
  return ThresholdConfig{delta, compute_constant(slices)};
}

double glr_statistic(const EmpiricalState& state, double gamma, Family family,
                     Criterion crit, Answer candidate) {
  const auto means = state.clamped_means(family);
  std::vector<double> counts(state.slices());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    counts[k] = static_cast<double>(state.counts()[k]);
  }
  return detail::alternative_infimum(family, means, gamma, crit, candidate,
                                     counts);
}

}  // namespace mbac
