#pragma once

#include <stdexcept>
#include <string>

namespace iflh {

// Error taxonomy. Each type corresponds to one class of contract
// violation so callers (and tests) can tell them apart.

struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnsupportedDomain : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NonPsdMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CurvatureMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidPartition : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace iflh
