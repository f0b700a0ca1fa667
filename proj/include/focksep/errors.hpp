#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace focksep {

// Base for everything we throw; each subtype names one failure mode so
// callers can distinguish "bad input" from "numerics gave up".
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluation requested where the quantity is undefined (e.g. singular density at 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature exhausted its panel budget before reaching tolerance.
class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

// No radius bracket with unit disk mass below the configured cap.
class BracketFailure : public Error {
 public:
  using Error::Error;
};

// Law normalizer could not be computed to the required accuracy.
class NormalizationFailure : public Error {
 public:
  using Error::Error;
};

// Index truncation exceeded its cap, or a tail bound could not be honored.
class TruncationFailure : public Error {
 public:
  using Error::Error;
};

class TailBoundFailure : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class TooFewPoints : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class UnsupportedFormat : public Error {
 public:
  using Error::Error;
};

struct SchemaViolation {
  std::string pointer;  // JSON pointer into the (normalized) config document
  std::string message;
};

// Carries every violation found, not just the first.
class SchemaError : public Error {
 public:
  explicit SchemaError(std::vector<SchemaViolation> violations)
      : Error(render(violations)), violations_(std::move(violations)) {}

  const std::vector<SchemaViolation>& violations() const { return violations_; }

 private:
  static std::string render(const std::vector<SchemaViolation>& vs) {
    std::string msg = "config schema violations:";
    for (const auto& v : vs) msg += "\n  " + v.pointer + ": " + v.message;
    return msg;
  }
  std::vector<SchemaViolation> violations_;
};

}  // namespace focksep
