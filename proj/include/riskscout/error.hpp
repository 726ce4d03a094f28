#ifndef RISKSCOUT_ERROR_HPP_
#define RISKSCOUT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace riskscout {

// Malformed input file or configuration.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Data that cannot be processed, e.g. a zero-variance whitening slice or a
// grid with no prior risk.
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An observation with zero probability under the current belief.
class ImpossibleObservationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Budget too small for the requested plan.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A search hit its hard node-expansion cap.
class CapExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace riskscout

#endif  // RISKSCOUT_ERROR_HPP_
