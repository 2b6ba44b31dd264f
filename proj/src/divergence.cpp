#include "mbac/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "mbac/errors.hpp"
#include "mbac/root.hpp"

namespace mbac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// a * log(a / b) evaluated through log1p so that a ~ b keeps precision.
double xlog_ratio(double a, double b) {
  if (a == 0.0) return 0.0;
  return a * std::log1p((a - b) / b);
}

double kl_unchecked(Family family, double a, double b) {
  if (a == b) return 0.0;
  switch (family) {
    case Family::Bernoulli: {
      const double v = xlog_ratio(a, b) + xlog_ratio(1.0 - a, 1.0 - b);
      return std::max(v, 0.0);
    }
    case Family::Poisson: {
      const double v = xlog_ratio(a, b) - (a - b);
      return std::max(v, 0.0);
    }
  }
  return 0.0;
}

double mixture_mean(double mu_k, double mu_j, double x) {
  if (std::isinf(x)) return mu_j;
  return (mu_k + x * mu_j) / (1.0 + x);
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::Bernoulli:
      return "bernoulli";
    case Family::Poisson:
      return "poisson";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  if (text == "bernoulli") return Family::Bernoulli;
  if (text == "poisson") return Family::Poisson;
  throw ValidationError("family: expected 'bernoulli' or 'poisson', got '" +
                        std::string(text) + "'");
}

bool in_domain(Family family, double mean) {
  if (!std::isfinite(mean)) return false;
  switch (family) {
    case Family::Bernoulli:
      return mean > 0.0 && mean < 1.0;
    case Family::Poisson:
      return mean > 0.0;
  }
  return false;
}

void require_in_domain(Family family, double mean) {
  if (!in_domain(family, mean)) {
    throw DomainError("mean " + std::to_string(mean) +
                      " outside the open domain of the " +
                      std::string(to_string(family)) + " family");
  }
}

double clamp_mean(Family family, double mean) {
  switch (family) {
    case Family::Bernoulli:
      return std::clamp(mean, kMeanClamp, 1.0 - kMeanClamp);
    case Family::Poisson:
      return std::max(mean, kMeanClamp);
  }
  return mean;
}

double kl(Family family, double a, double b) {
  require_in_domain(family, a);
  require_in_domain(family, b);
  return kl_unchecked(family, a, b);
}

double weighted_info(Family family, double alpha, double mu, double nu) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw DomainError("weight alpha must lie in [0, 1]");
  }
  require_in_domain(family, mu);
  require_in_domain(family, nu);
  const double m = alpha * mu + (1.0 - alpha) * nu;
  return alpha * kl_unchecked(family, mu, m) +
         (1.0 - alpha) * kl_unchecked(family, nu, m);
}

double info_deviation(Family family, double mu_k, double mu_j, double x) {
  if (!(x >= 0.0)) throw DomainError("info_deviation: x must be >= 0");
  require_in_domain(family, mu_k);
  require_in_domain(family, mu_j);
  if (std::isinf(x)) return kl_unchecked(family, mu_k, mu_j);
  const double m = mixture_mean(mu_k, mu_j, x);
  return kl_unchecked(family, mu_k, m) + x * kl_unchecked(family, mu_j, m);
}

double info_deviation_slope(Family family, double mu_k, double mu_j,
                            double x) {
  if (!(x >= 0.0)) throw DomainError("info_deviation_slope: x must be >= 0");
  require_in_domain(family, mu_k);
  require_in_domain(family, mu_j);
  return kl_unchecked(family, mu_j, mixture_mean(mu_k, mu_j, x));
}

double info_deviation_inverse(Family family, double mu_k, double mu_j,
                              double y) {
  require_in_domain(family, mu_k);
  require_in_domain(family, mu_j);
  const double sup = kl_unchecked(family, mu_k, mu_j);
  if (!(y >= 0.0) || !(y < sup)) {
    throw RangeError("info_deviation_inverse: y=" + std::to_string(y) +
                     " outside [0, " + std::to_string(sup) + ")");
  }
  if (y == 0.0) return 0.0;

  // g(x) and its slope d(mu_j, m) share the divergence at the mixture mean.
  double slope = kl_unchecked(family, mu_j, mu_k);
  auto eval = [&](double x) {
    const double m = mixture_mean(mu_k, mu_j, x);
    slope = kl_unchecked(family, mu_j, m);
    return kl_unchecked(family, mu_k, m) + x * slope;
  };

  // g is increasing and concave: a Newton step from either side lands on
  // the left of the root and iterates stay there. The start solves
  // sup * x / (1 + x) = y, the shape of g for nearby means.
  const double tol = 1e-14 * std::max(1.0, y);
  double lo = 0.0;
  double hi = kInf;
  double x = y / (sup - y);
  double gx = eval(x);
  for (int iter = 0; iter < 400; ++iter) {
    if (gx < y) {
      lo = x;
    } else {
      hi = x;
    }
    const double residual = y - gx;
    if (std::abs(residual) <= tol) return x;
    if (!std::isinf(hi) &&
        hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      return x;
    }
    double next = slope > 0.0 ? x + residual / slope : kInf;
    if (!(next > lo && next < hi) || !std::isfinite(next)) {
      next = std::isinf(hi) ? 2.0 * lo + 1.0 : 0.5 * (lo + hi);
    }
    x = next;
    gx = eval(x);
  }
  throw ConvergenceError("info_deviation_inverse did not converge");
}

double equilibrium_value(Family family, std::span<const double> mu,
                         std::size_t target,
                         std::span<const std::size_t> comparators, double y) {
  if (comparators.empty()) {
    throw DomainError("equilibrium_value: empty comparator set");
  }
  const double mu_k = mu[target];
  double total = 0.0;
  for (std::size_t j : comparators) {
    if (j == target) throw DomainError("equilibrium_value: target in set");
    const double mu_j = mu[j];
    const double x = info_deviation_inverse(family, mu_k, mu_j, y);
    const double m = mixture_mean(mu_k, mu_j, x);
    const double den = kl_unchecked(family, mu_j, m);
    if (den <= 0.0) return kInf;
    total += kl_unchecked(family, mu_k, m) / den;
  }
  return total;
}

double equilibrium_root(Family family, std::span<const double> mu,
                        std::size_t target,
                        std::span<const std::size_t> comparators) {
  if (comparators.empty()) {
    throw DomainError("equilibrium_root: empty comparator set");
  }
  double upper_end = kInf;
  for (std::size_t j : comparators) {
    const double d = kl(family, mu[target], mu[j]);
    if (d <= 0.0) {
      throw AmbiguityError("equilibrium_root: comparator mean equals target");
    }
    upper_end = std::min(upper_end, d);
  }

  // F and dF/dy in one pass. With x_j = x(y) and m_j its mixture mean,
  // dx/dy = 1 / d(mu_j, m_j), dm/dx = (mu_j - mu_k) / (1 + x)^2 and
  // d/dm d(a, m) = (m - a) / V(m) with V the family's variance function.
  const double mu_k = mu[target];
  auto fdf = [&](double y) -> std::pair<double, double> {
    double value = 0.0;
    double slope = 0.0;
    for (std::size_t j : comparators) {
      const double mu_j = mu[j];
      const double x = info_deviation_inverse(family, mu_k, mu_j, y);
      const double m = mixture_mean(mu_k, mu_j, x);
      const double num = kl_unchecked(family, mu_k, m);
      const double den = kl_unchecked(family, mu_j, m);
      if (den <= 0.0) return {kInf, kInf};
      const double var =
          family == Family::Bernoulli ? m * (1.0 - m) : m;
      const double dm_dy =
          (mu_j - mu_k) / ((1.0 + x) * (1.0 + x)) / den;
      const double dnum = (m - mu_k) / var;
      const double dden = (m - mu_j) / var;
      value += num / den;
      slope += (dnum * den - num * dden) / (den * den) * dm_dy;
    }
    return {value - 1.0, slope};
  };

  double hi = (1.0 - 1e-9) * upper_end;
  double lo = std::min(1e-12, 1e-6 * hi);
  for (int i = 0; i < 20 && fdf(lo).first >= 0.0; ++i) lo *= 1e-3;
  for (double gap = 1e-10; fdf(hi).first <= 0.0; gap *= 1e-1) {
    if (gap < 1e-16) throw ConvergenceError("equilibrium_root: no bracket");
    hi = (1.0 - gap) * upper_end;
  }
  return find_root_newton(fdf, lo, hi, 0.5 * upper_end, RootOptions{1e-10, 200});
}

double confidence_factor(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("confidence_factor: delta must lie in (0, 1)");
  }
  if (delta == 0.5) return 0.0;
  return kl_unchecked(Family::Bernoulli, delta, 1.0 - delta);
}

}  // namespace mbac
