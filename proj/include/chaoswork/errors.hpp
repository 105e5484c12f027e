#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chaoswork {

/// A position handed to an operation lies outside the configuration domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A caller violated an input contract (asymmetric transform input,
/// non-Hermitian matrix, empty series, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Integration failed. Carries the last phase-space state and time so the
/// offending trajectory can be replayed.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, std::vector<double> state, double time)
      : std::runtime_error(what), state_(std::move(state)), time_(time) {}

  const std::vector<double>& state() const noexcept { return state_; }
  double time() const noexcept { return time_; }

 private:
  std::vector<double> state_;
  double time_;
};

/// A NumericalFailure raised while evaluating node `node()` of an action sum.
class NodeFailure : public NumericalFailure {
 public:
  NodeFailure(const NumericalFailure& cause, std::size_t node)
      : NumericalFailure("node " + std::to_string(node) + ": " + cause.what(), cause.state(),
                         cause.time()),
        node_(node) {}

  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

/// Amplitude norm drifted beyond tolerance; retry with more steps.
class StepSizeError : public std::runtime_error {
 public:
  StepSizeError(const std::string& what, double drift)
      : std::runtime_error(what), drift_(drift) {}
  double drift() const noexcept { return drift_; }

 private:
  double drift_;
};

/// More trajectories failed than the configured budget allows.
class FailureBudgetExceeded : public std::runtime_error {
 public:
  FailureBudgetExceeded(const std::string& what, std::size_t failed, std::size_t total)
      : std::runtime_error(what), failed_(failed), total_(total) {}
  std::size_t failed() const noexcept { return failed_; }
  std::size_t total() const noexcept { return total_; }

 private:
  std::size_t failed_;
  std::size_t total_;
};

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Invalid run configuration: names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, std::string reason)
      : std::runtime_error(field + ": " + reason),
        field_(std::move(field)),
        reason_(std::move(reason)) {}

  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string field_;
  std::string reason_;
};

}  // namespace chaoswork
