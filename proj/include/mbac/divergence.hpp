#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace mbac {

/// One-parameter exponential family of per-slot observations.
enum class Family { Bernoulli, Poisson };

std::string_view to_string(Family family);
Family parse_family(std::string_view text);

/// Means are clamped this far inside the open domain before divergences
/// are evaluated on empirical estimates.
inline constexpr double kMeanClamp = 1e-9;

bool in_domain(Family family, double mean);
void require_in_domain(Family family, double mean);

/// Clamp into [kMeanClamp, 1 - kMeanClamp] (Bernoulli) or [kMeanClamp, inf)
/// (Poisson).
double clamp_mean(Family family, double mean);

/// KL divergence d(a, b) between the family members with means a and b.
/// Throws DomainError if either mean is outside the open domain.
double kl(Family family, double a, double b);

/// I_alpha(mu, nu) = alpha d(mu, m) + (1 - alpha) d(nu, m),
/// m = alpha mu + (1 - alpha) nu.
double weighted_info(Family family, double alpha, double mu, double nu);

/// g(x) = d(mu_k, m) + x d(mu_j, m), m = (mu_k + x mu_j) / (1 + x).
///
/// Information gathered against the alternative where comparator j and
/// target k swap order, when j is measured x times as often as k.
/// Increasing in x with supremum d(mu_k, mu_j).
double info_deviation(Family family, double mu_k, double mu_j, double x);

/// dg/dx, which reduces to d(mu_j, m).
double info_deviation_slope(Family family, double mu_k, double mu_j, double x);

/// Inverse of info_deviation in x. Requires 0 <= y < d(mu_k, mu_j);
/// throws RangeError otherwise.
double info_deviation_inverse(Family family, double mu_k, double mu_j,
                              double y);

/// F_k(y; S) = sum_{j in S} d(mu_k, m_j) / d(mu_j, m_j) where m_j is the
/// mixture mean at x_j = info_deviation_inverse(mu_k, mu_j, y).
/// Defined for y in (0, min_{j in S} d(mu_k, mu_j)).
double equilibrium_value(Family family, std::span<const double> mu,
                         std::size_t target,
                         std::span<const std::size_t> comparators, double y);

/// The unique y with F_k(y; S) = 1.
double equilibrium_root(Family family, std::span<const double> mu,
                        std::size_t target,
                        std::span<const std::size_t> comparators);

/// Bernoulli divergence d_B(delta, 1 - delta), the confidence factor of the
/// sample-complexity lower bounds.
double confidence_factor(double delta);

}  // namespace mbac
