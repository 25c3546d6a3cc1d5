#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace inrsep {

// Shape or length disagreement between operands.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A forward pass produced NaN or Inf.
struct NonFiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Training aborted because the loss went non-finite.
struct DivergenceError : std::runtime_error {
  std::size_t epoch;
  DivergenceError(std::size_t epoch_, const std::string& what_)
      : std::runtime_error(what_), epoch(epoch_) {}
};

// Malformed or unusable input data (empty grid, empty support, zero
// denominator, degenerate axis range, ...).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File-format failures, one kind per distinct on-disk defect.
struct IoError : std::runtime_error {
  enum class Kind {
    kOpenFailed,
    kBadMagic,
    kBadVersion,
    kBadDtype,
    kTruncated,
    kSizeMismatch,
    kCorrupt,
  };
  Kind kind;
  IoError(Kind kind_, const std::string& what_)
      : std::runtime_error(what_), kind(kind_) {}
};

}  // namespace inrsep
