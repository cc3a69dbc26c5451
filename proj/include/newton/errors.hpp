#pragma once

#include <stdexcept>
#include <string>

namespace newton {

/// The combinatorial structure of the body could not be resolved; callers
/// are expected to perturb the configuration (or reject a trial step).
class DegenerateConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A tangency condition had no admissible solution near the requested seed.
class NoRoot : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A refinement lift would leave the open feasible set (height >= M).
class InvalidLift : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No on-axis points were available to seed the first extremal arc.
class EmptyArc : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point set or configuration violates its documented invariants.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace newton
