#ifndef KRAICHNAN_ERRORS_HPP
#define KRAICHNAN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kraichnan {

// Invalid configuration (bad parameter range, inconsistent sizes). The CLI
// maps this to exit code 2 with an error JSON naming the field.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

  private:
    std::string field_;
};

// Runtime failure (solver non-convergence, bad data). CLI exit code 1.
class SolveError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace kraichnan

#endif
