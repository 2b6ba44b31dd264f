#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "mbac/errors.hpp"

namespace mbac {

struct RootOptions {
  double f_tolerance = 1e-10;
  int max_iterations = 200;
};

/// Root of a continuous increasing function on a bracket [lo, hi] with
/// f(lo) <= 0 <= f(hi).
///
/// Regula falsi (Illinois variant) steps, falling back to bisection whenever
/// a step fails to halve the bracket. Stops once |f(x)| <= f_tolerance, or
/// when the bracket has collapsed to adjacent doubles.
template <typename Function>
double find_root_increasing(const Function& f, double lo, double hi,
                            const RootOptions& options = {}) {
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (std::abs(f_lo) <= options.f_tolerance) return lo;
  if (std::abs(f_hi) <= options.f_tolerance) return hi;
  if (!(f_lo < 0.0 && f_hi > 0.0)) {
    throw ConvergenceError("root not bracketed: f(" + std::to_string(lo) +
                           ")=" + std::to_string(f_lo) + ", f(" +
                           std::to_string(hi) + ")=" + std::to_string(f_hi));
  }

  int side = 0;  // which end was retained last, for the Illinois weighting
  double width = hi - lo;
  double best_x = lo;
  double best_f = f_lo;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    double x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
    if (!(x > lo && x < hi) || !std::isfinite(x)) x = lo + 0.5 * (hi - lo);
    // Every few steps force a bisection if the bracket is not shrinking.
    if (iter % 3 == 2 && hi - lo > 0.5 * width) x = lo + 0.5 * (hi - lo);
    if (iter % 3 == 2) width = hi - lo;

    const double fx = f(x);
    if (std::abs(fx) < std::abs(best_f)) {
      best_x = x;
      best_f = fx;
    }
    if (std::abs(fx) <= options.f_tolerance) return x;

    if (fx < 0.0) {
      lo = x;
      f_lo = fx;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      hi = x;
      f_hi = fx;
      if (side == +1) f_lo *= 0.5;
      side = +1;
    }
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() *
                       std::max(std::abs(lo), std::abs(hi))) {
      return best_x;
    }
  }
  throw ConvergenceError("root solver exceeded " +
                         std::to_string(options.max_iterations) +
                         " iterations; best residual " + std::to_string(best_f));
}

/// Same contract as find_root_increasing for a function that also reports
/// its derivative: `fdf(x)` returns {f(x), f'(x)}. Newton steps are taken
/// from the best point so far and replaced by bisection whenever they leave
/// the current bracket.
template <typename FunctionWithSlope>
double find_root_newton(const FunctionWithSlope& fdf, double lo, double hi,
                        double start, const RootOptions& options = {}) {
  auto [f_lo, s_lo] = fdf(lo);
  auto [f_hi, s_hi] = fdf(hi);
  if (std::abs(f_lo) <= options.f_tolerance) return lo;
  if (std::abs(f_hi) <= options.f_tolerance) return hi;
  if (!(f_lo < 0.0 && f_hi > 0.0)) {
    throw ConvergenceError("root not bracketed: f(" + std::to_string(lo) +
                           ")=" + std::to_string(f_lo) + ", f(" +
                           std::to_string(hi) + ")=" + std::to_string(f_hi));
  }
  double x = (start > lo && start < hi) ? start : lo + 0.5 * (hi - lo);
  double best_x = x;
  double best_f = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const auto [fx, dfx] = fdf(x);
    if (std::abs(fx) < std::abs(best_f)) {
      best_x = x;
      best_f = fx;
    }
    if (std::abs(fx) <= options.f_tolerance) return x;
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() *
                       std::max(std::abs(lo), std::abs(hi))) {
      return best_x;
    }
    double next = x - fx / dfx;
    if (!(next > lo && next < hi) || !std::isfinite(next)) {
      next = lo + 0.5 * (hi - lo);
    }
    x = next;
  }
  throw ConvergenceError("root solver exceeded " +
                         std::to_string(options.max_iterations) +
                         " iterations; best residual " + std::to_string(best_f));
}

}  // namespace mbac
