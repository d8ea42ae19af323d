#pragma once

#include <stdexcept>
#include <string>

namespace grgc {

/// Input outside an operation's mathematical domain.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Query outside the range that was computed (e.g. a census scanned too shallow).
class RangeError : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

/// A series or moment that does not converge for the given parameters.
class DivergenceError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Exhaustive evaluators refuse inputs above their configured size limit.
class RefusalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class IncompleteInputError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid experiment or CLI configuration. Carries the offending key when known.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key))
    {
    }
    explicit ConfigError(const std::string& what) : ConfigError("", what) {}

    const std::string& key() const noexcept { return key_; }

  private:
    std::string key_;
};

/// Reading or writing a file failed.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace grgc
