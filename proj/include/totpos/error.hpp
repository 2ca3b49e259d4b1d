#ifndef TOTPOS_ERROR_HPP_
#define TOTPOS_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace totpos {

// Base class of everything thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: axis mismatch, unknown variable, overlapping sets,
// non-monotone coarsening partitions and the like.
class invalid_input : public error {
 public:
  using error::error;
};

// A documented precondition of an operation does not hold on this input
// (zero conditioning event, missing interval support, not MTP2, ...).
class precondition_error : public error {
 public:
  using error::error;
};

// Enumeration guards (|V| <= 6 for independence models, <= 12 for cliques).
class size_guard_error : public error {
 public:
  using error::error;
};

// Raised when a result contradicts a theorem the code relies on. Seeing one
// of these means a bug, or input outside the stated hypotheses.
class internal_inconsistency : public error {
 public:
  using error::error;
};

}  // namespace totpos

#endif  // TOTPOS_ERROR_HPP_
