#pragma once

#include <stdexcept>
#include <string>

namespace perturb {

/// A caller broke a documented precondition (bad vertex, clashing colours, illegal absorber).
class ContractError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// An experiment or generator configuration is infeasible. `field` names the offending knob.
class ConfigError : public std::invalid_argument {
  public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field))
    {
    }
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

/// Malformed graph text or JSON input.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace perturb
