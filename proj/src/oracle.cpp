#include "mbac/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mbac/errors.hpp"

namespace mbac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Keeps 1/d finite for a mean sitting exactly on the threshold.
constexpr double kTinyDivergence = 1e-300;

double inverse_gap(Family family, double mu, double gamma) {
  return 1.0 / std::max(kl(family, mu, gamma), kTinyDivergence);
}

std::size_t argmin_lowest(std::span<const double> mu) {
  return static_cast<std::size_t>(
      std::min_element(mu.begin(), mu.end()) - mu.begin());
}

// Lowest-index maximum among means strictly below gamma. Caller ensures one
// exists.
std::size_t packing_target(std::span<const double> mu, double gamma) {
  std::size_t best = mu.size();
  for (std::size_t k = 0; k < mu.size(); ++k) {
    if (mu[k] < gamma && (best == mu.size() || mu[k] > mu[best])) best = k;
  }
  return best;
}

bool has_available(std::span<const double> mu, double gamma) {
  return std::any_of(mu.begin(), mu.end(), [&](double m) { return m < gamma; });
}

// Arms indistinguishable from the target; a divergence that underflows to 0
// counts as a tie as well.
std::vector<std::size_t> tied_with(Family family, std::span<const double> mu,
                                   std::size_t target) {
  std::vector<std::size_t> tied;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    if (k == target) continue;
    if (mu[k] == mu[target] || kl(family, mu[target], mu[k]) <= 0.0) {
      tied.push_back(k);
    }
  }
  return tied;
}

// Weights in the limit where comparators converge onto the target: every
// local divergence is quadratic with the same curvature, so the pair
// equilibrium gives the target weight 1 and each of m tied arms 1/sqrt(m).
OracleResult tie_limit(const Instance& inst, std::size_t target,
                       const std::vector<std::size_t>& tied) {
  OracleResult r;
  r.regime = Regime::Available;
  r.characteristic_time = kInf;
  r.weights.assign(inst.slices(), 0.0);
  const double each = 1.0 / std::sqrt(static_cast<double>(tied.size()));
  const double total = 1.0 + each * static_cast<double>(tied.size());
  r.weights[target] = 1.0 / total;
  for (std::size_t j : tied) r.weights[j] = each / total;
  r.easiest_answers = {Answer::slice(target)};
  return r;
}

OracleResult no_available(const Instance& inst, Regime regime) {
  OracleResult r;
  r.regime = regime;
  std::vector<double> raw(inst.slices());
  for (std::size_t k = 0; k < inst.slices(); ++k) {
    raw[k] = inverse_gap(inst.family, inst.mu[k], inst.gamma);
  }
  r.characteristic_time = std::accumulate(raw.begin(), raw.end(), 0.0);
  r.weights.resize(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    r.weights[k] = raw[k] / r.characteristic_time;
  }
  r.easiest_answers = {Answer::reject()};
  return r;
}

// Best-arm-identification style allocation against `comparators`, capped by
// the threshold constraint on the target. Arms in `above` get 1/d(mu, gamma).
OracleResult equilibrium_allocation(const Instance& inst, std::size_t target,
                                    const std::vector<std::size_t>& comparators,
                                    const std::vector<std::size_t>& above) {
  OracleResult r;
  r.regime = Regime::Available;
  r.easiest_answers = {Answer::slice(target)};

  const double mu_t = inst.mu[target];
  const double target_gap = kl(inst.family, mu_t, inst.gamma);
  const double y = equilibrium_root(inst.family, inst.mu, target, comparators);
  const double z = std::min(target_gap, y);
  r.equilibrium = y;
  r.capped_equilibrium = z;

  std::vector<double> raw(inst.slices(), 0.0);
  raw[target] = 1.0 / z;
  for (std::size_t j : comparators) {
    raw[j] = info_deviation_inverse(inst.family, mu_t, inst.mu[j], z) / z;
  }
  for (std::size_t k : above) {
    raw[k] = inverse_gap(inst.family, inst.mu[k], inst.gamma);
  }
  r.characteristic_time = std::accumulate(raw.begin(), raw.end(), 0.0);
  r.weights.resize(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    r.weights[k] = raw[k] / r.characteristic_time;
  }
  return r;
}

double pair_value(Family family, double mu_t, double w_t, double mu_k,
                  double w_k) {
  const double total = w_t + w_k;
  if (total <= 0.0 || mu_k == mu_t) return 0.0;
  const double m = (w_t * mu_t + w_k * mu_k) / total;
  return w_t * kl(family, mu_t, m) + w_k * kl(family, mu_k, m);
}

}  // namespace

std::string_view to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::AnyAvailable:
      return "any";
    case Criterion::Packing:
      return "packing";
    case Criterion::LeastLoaded:
      return "least-loaded";
  }
  return "?";
}

Criterion parse_criterion(std::string_view text) {
  if (text == "any" || text == "any-available") return Criterion::AnyAvailable;
  if (text == "packing") return Criterion::Packing;
  if (text == "least-loaded" || text == "least") return Criterion::LeastLoaded;
  throw ValidationError("criterion: expected 'any', 'packing' or "
                        "'least-loaded', got '" + std::string(text) + "'");
}

std::string to_string(Answer answer) {
  return std::to_string(answer.value());
}

void validate(const Instance& inst) {
  if (inst.mu.empty()) throw ValidationError("mu: at least one slice required");
  require_in_domain(inst.family, inst.gamma);
  for (std::size_t k = 0; k < inst.mu.size(); ++k) {
    require_in_domain(inst.family, inst.mu[k]);
    if (inst.mu[k] == inst.gamma) {
      throw ValidationError("mu: slice " + std::to_string(k + 1) +
                            " load equals the threshold gamma");
    }
  }
}

std::vector<Answer> correct_answers(const Instance& inst, Criterion crit,
                                    TiePolicy ties) {
  const std::span<const double> mu = inst.mu;
  if (!has_available(mu, inst.gamma)) return {Answer::reject()};
  std::size_t target = 0;
  switch (crit) {
    case Criterion::AnyAvailable: {
      std::vector<Answer> out;
      for (std::size_t k = 0; k < mu.size(); ++k) {
        if (mu[k] < inst.gamma) out.push_back(Answer::slice(k));
      }
      return out;
    }
    case Criterion::Packing:
      target = packing_target(mu, inst.gamma);
      break;
    case Criterion::LeastLoaded:
      target = argmin_lowest(mu);
      break;
  }
  if (ties == TiePolicy::Throw && !tied_with(inst.family, mu, target).empty()) {
    throw AmbiguityError(std::string(to_string(crit)) +
                         " target is not unique");
  }
  return {Answer::slice(target)};
}

bool is_correct(const Instance& inst, Criterion crit, Answer answer) {
  const std::span<const double> mu = inst.mu;
  if (!has_available(mu, inst.gamma)) return answer.is_reject();
  if (answer.is_reject() || answer.index() >= mu.size()) return false;
  const double chosen = mu[answer.index()];
  if (!(chosen < inst.gamma)) return false;
  switch (crit) {
    case Criterion::AnyAvailable:
      return true;
    case Criterion::Packing:
      return chosen == mu[packing_target(mu, inst.gamma)];
    case Criterion::LeastLoaded:
      return chosen == mu[argmin_lowest(mu)];
  }
  return false;
}

Answer easiest_answer(std::span<const double> mu, double gamma,
                      Criterion crit) {
  if (!has_available(mu, gamma)) return Answer::reject();
  switch (crit) {
    case Criterion::AnyAvailable:
    case Criterion::LeastLoaded:
      return Answer::slice(argmin_lowest(mu));
    case Criterion::Packing:
      return Answer::slice(packing_target(mu, gamma));
  }
  return Answer::reject();
}

OracleResult oracle(const Instance& inst, Criterion crit, TiePolicy ties) {
  const std::span<const double> mu = inst.mu;
  const std::size_t K = mu.size();
  if (!has_available(mu, inst.gamma)) {
    return no_available(inst, Regime::NoAvailable);
  }

  switch (crit) {
    case Criterion::AnyAvailable: {
      const std::size_t best = argmin_lowest(mu);
      OracleResult r;
      r.regime = Regime::Available;
      r.characteristic_time = inverse_gap(inst.family, mu[best], inst.gamma);
      r.weights.assign(K, 0.0);
      r.weights[best] = 1.0;
      for (std::size_t k = 0; k < K; ++k) {
        if (mu[k] == mu[best]) r.easiest_answers.push_back(Answer::slice(k));
      }
      return r;
    }

    case Criterion::Packing: {
      const std::size_t target = packing_target(mu, inst.gamma);
      const auto tied = tied_with(inst.family, mu, target);
      if (!tied.empty()) {
        if (ties == TiePolicy::Throw) {
          throw AmbiguityError("packing target is not unique");
        }
        return tie_limit(inst, target, tied);
      }
      std::vector<std::size_t> comparators;
      std::vector<std::size_t> above;
      for (std::size_t k = 0; k < K; ++k) {
        if (k == target) continue;
        (mu[k] < inst.gamma ? comparators : above).push_back(k);
      }
      if (comparators.empty()) {
        // Single available slice: every arm is only confusable with its
        // side of the threshold.
        OracleResult r = no_available(inst, Regime::Available);
        r.easiest_answers = {Answer::slice(target)};
        return r;
      }
      return equilibrium_allocation(inst, target, comparators, above);
    }

    case Criterion::LeastLoaded: {
      const std::size_t target = argmin_lowest(mu);
      const auto tied = tied_with(inst.family, mu, target);
      if (!tied.empty()) {
        if (ties == TiePolicy::Throw) {
          throw AmbiguityError("least-loaded target is not unique");
        }
        return tie_limit(inst, target, tied);
      }
      std::vector<std::size_t> comparators;
      for (std::size_t k = 0; k < K; ++k) {
        if (k != target) comparators.push_back(k);
      }
      if (comparators.empty()) {
        OracleResult r = no_available(inst, Regime::Available);
        r.easiest_answers = {Answer::slice(target)};
        return r;
      }
      return equilibrium_allocation(inst, target, comparators, {});
    }
  }
  throw std::logic_error("unknown criterion");
}

double detail::alternative_infimum(Family family, std::span<const double> mu,
                                   double gamma, Criterion crit, Answer answer,
                                   std::span<const double> w) {
  const std::size_t K = mu.size();
  if (answer.is_reject()) {
    double best = kInf;
    for (std::size_t k = 0; k < K; ++k) {
      best = std::min(best, w[k] * kl(family, mu[k], gamma));
    }
    return best;
  }

  const std::size_t t = answer.index();
  const double mu_t = mu[t];
  const double threshold_term = w[t] * kl(family, mu_t, gamma);
  if (crit == Criterion::AnyAvailable) return threshold_term;

  double best = threshold_term;
  for (std::size_t k = 0; k < K && best > 0.0; ++k) {
    if (k == t) continue;
    if (crit == Criterion::Packing) {
      if (mu[k] >= gamma) {
        best = std::min(best, w[k] * kl(family, mu[k], gamma));
      } else if (mu[k] >= mu_t) {
        best = 0.0;  // already at least as loaded as the target
      } else {
        best = std::min(best, pair_value(family, mu_t, w[t], mu[k], w[k]));
      }
    } else {
      if (mu[k] <= mu_t) {
        best = 0.0;
      } else {
        best = std::min(best, pair_value(family, mu_t, w[t], mu[k], w[k]));
      }
    }
  }
  return best;
}

double inner_value(const Instance& inst, Criterion crit, Answer answer,
                   std::span<const double> w) {
  if (w.size() != inst.slices()) {
    throw ValidationError("inner_value: weight vector has wrong length");
  }
  const auto ok = correct_answers(inst, crit);
  if (std::find(ok.begin(), ok.end(), answer) == ok.end()) {
    throw ValidationError("inner_value: answer " + to_string(answer) +
                          " is not correct for this instance");
  }
  return detail::alternative_infimum(inst.family, inst.mu, inst.gamma, crit,
                                     answer, w);
}

}  // namespace mbac
