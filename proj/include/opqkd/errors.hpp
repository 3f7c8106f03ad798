#pragma once

#include <stdexcept>
#include <string>

namespace opqkd {

// Dimension below 3: no usable orthogonal product set exists.
class UnsupportedDimension : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A state list or layout that violates the domino-basis structure.
class InvalidSet : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A channel hook invoked out of the two-leg order.
class ProtocolOrderError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Statistic requested over an empty sample.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace opqkd
