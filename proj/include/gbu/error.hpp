#pragma once

#include <stdexcept>
#include <string>

namespace gbu {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem parameters violate the standing hypotheses (q > p > 2, mu >= 0).
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

/// Grid or domain description is inconsistent.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// An explicit step produced a non-finite value.
class StepDiverged : public Error {
 public:
  using Error::Error;
};

/// An iterative solver failed to meet its tolerance.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// A precondition of a diagnostic was not met (e.g. the run did not blow up).
class DiagnosticError : public Error {
 public:
  using Error::Error;
};

/// Configuration problems. The offending key is carried separately so the
/// CLI can report it.
class ConfigError : public Error {
 public:
  enum class Kind { MissingKey, TypeMismatch, ConstraintViolation, UnknownKey, Syntax };

  ConfigError(Kind kind, std::string key, const std::string& what)
      : Error(describe(kind) + " [" + key + "]: " + what), kind_(kind), key_(std::move(key)) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& key() const noexcept { return key_; }

 private:
  static std::string describe(Kind k) {
    switch (k) {
      case Kind::MissingKey: return "MissingKey";
      case Kind::TypeMismatch: return "TypeMismatch";
      case Kind::ConstraintViolation: return "ConstraintViolation";
      case Kind::UnknownKey: return "UnknownKey";
      case Kind::Syntax: return "Syntax";
    }
    return "ConfigError";
  }

  Kind kind_;
  std::string key_;
};

}  // namespace gbu
