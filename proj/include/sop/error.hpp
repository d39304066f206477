#pragma once

#include <stdexcept>
#include <string>

namespace sop {

/// Argument outside the mathematical domain of a function (Ei(x) with x >= 0, ...).
class domain_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Adaptive quadrature did not meet its tolerance within the subdivision budget.
class convergence_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Evaluation refused because the result cannot be trusted (for example
/// catastrophic cancellation in an alternating binomial sum).
class range_error : public std::range_error {
public:
  using std::range_error::range_error;
};

/// The requested (scheme, method) or limit has no implementation.
class unsupported_error : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

class config_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sop
