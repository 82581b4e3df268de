#pragma once

#include <stdexcept>
#include <string>

namespace consensus {

// Argument outside the mathematical domain of an operation (negative
// distance, non-positive entropy input, alpha = 1 for Renyi, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Effective weights violate the convexity requirement of the time-one map.
class ModelInvalidError : public std::runtime_error {
 public:
  ModelInvalidError(const std::string& what, std::size_t v, std::size_t w)
      : std::runtime_error(what), v_(v), w_(w) {}
  std::size_t first() const { return v_; }
  std::size_t second() const { return w_; }

 private:
  std::size_t v_;
  std::size_t w_;
};

class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Coincident positions under a singular interaction.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& what, std::size_t i, std::size_t k)
      : std::runtime_error(what), i_(i), k_(k) {}
  std::size_t first() const { return i_; }
  std::size_t second() const { return k_; }

 private:
  std::size_t i_;
  std::size_t k_;
};

// Invalid experiment configuration; `field` is the dotted path of the
// offending entry, e.g. "model.kernel".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace consensus
