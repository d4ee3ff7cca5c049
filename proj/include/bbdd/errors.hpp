#ifndef BBDD_ERRORS_HPP_
#define BBDD_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace bbdd {

/// A protocol, drift, bath or RTN description violates its invariants.
class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Arguments outside an operation's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Exhaustive enumeration was requested beyond the configured cap.
class MustSample : public std::runtime_error {
 public:
  MustSample(const std::string& what, int cap)
      : std::runtime_error(what), cap_(cap) {}
  int cap() const noexcept { return cap_; }

 private:
  int cap_;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  /// Relative difference between the last two refinement levels.
  double achieved_tolerance() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// A config key is missing, malformed or unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Lookup of an id that does not exist.
class NotFound : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace bbdd

#endif  // BBDD_ERRORS_HPP_
