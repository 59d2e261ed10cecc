#pragma once

#include <stdexcept>
#include <string>

namespace rhpc {

/// Configuration or input rejected by a named validation rule.
class ValidationError : public std::runtime_error {
public:
  ValidationError(std::string rule, const std::string &what)
      : std::runtime_error(rule + ": " + what), rule_(std::move(rule)) {}

  const std::string &rule() const noexcept { return rule_; }

private:
  std::string rule_;
};

/// A non-finite value appeared during simulation.
class NumericError : public std::runtime_error {
public:
  NumericError(int agent, long step, const std::string &what)
      : std::runtime_error(what), agent_(agent), step_(step) {}

  int agent() const noexcept { return agent_; }
  long step() const noexcept { return step_; }

private:
  int agent_;
  long step_;
};

} // namespace rhpc
