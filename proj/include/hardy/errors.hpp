#pragma once

#include <stdexcept>
#include <string>

namespace hardy {

/// Input violates an operation's precondition (grid too coarse, bad boundary data, ...).
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical certificate failed: residual above tolerance, sign violation,
/// or two independent evaluations of the same quantity disagree.
class certificate_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mass near the edge of the truncated box exceeds the tail tolerance.
/// For weighted norms this means the norm is effectively infinite at this truncation.
class tail_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw precondition_error(what);
}

inline void certify(bool ok, const std::string& what) {
  if (!ok) throw certificate_error(what);
}

}  // namespace detail
}  // namespace hardy
