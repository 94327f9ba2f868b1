#pragma once

#include <stdexcept>
#include <string>

namespace qmitm {

// Malformed arguments: out-of-range keys, bad depth, non-bijections...
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A request that is well-formed but exceeds the desk-scale guards.
class InfeasibleSize : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AttackFailureKind { NoKeyFound, AmbiguousKey };

class AttackFailure : public std::runtime_error {
 public:
  AttackFailure(AttackFailureKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  AttackFailureKind kind() const noexcept { return kind_; }

 private:
  AttackFailureKind kind_;
};

// Search over an empty marked set, or an adversary matrix with no weight.
class UndefinedValue : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Search with nothing to find.
class InfeasibleSearch : public UndefinedValue {
 public:
  using UndefinedValue::UndefinedValue;
};

}  // namespace qmitm
