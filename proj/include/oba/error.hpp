#pragma once

#include <stdexcept>
#include <string>

namespace oba {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidRotation : public Error {
 public:
  using Error::Error;
};

/// GRP conversion hit a + dq4 <= 0.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Dominant eigenvalue of the averaging matrix is not simple.
class AmbiguousAverage : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Sensor stream gaps, out-of-range interpolation, missing history.
class DataError : public Error {
 public:
  using Error::Error;
};

class DegeneratePair : public Error {
 public:
  using Error::Error;
};

class RankDeficiency : public Error {
 public:
  RankDeficiency(const std::string& what, double gap) : Error(what), gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace oba
