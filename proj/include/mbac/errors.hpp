#pragma once

#include <stdexcept>
#include <string>

namespace mbac {

/// Argument outside the open mean domain of an observation family.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Value with no preimage, e.g. inverting beyond a supremum.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Root solver or fixed point did not meet its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Packing or least-loaded target is not unique.
class AmbiguityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// User-facing validation failure (bad config field, bad CLI value).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A measurement episode exceeded its slot budget.
class EpisodeTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mbac
