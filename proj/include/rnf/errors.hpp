#pragma once

#include <stdexcept>
#include <string>

namespace rnf {

// Input could not be understood or is inconsistent with the truncation window.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ContextMismatch : public InputError {
 public:
  using InputError::InputError;
};

class CutoffTooSmall : public InputError {
 public:
  using InputError::InputError;
};

// The frequency vector violates a standing assumption of the method.
class ModelAssumptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UniqueFactorizationViolation : public ModelAssumptionError {
 public:
  using ModelAssumptionError::ModelAssumptionError;
};

class ZeroFrequency : public ModelAssumptionError {
 public:
  using ModelAssumptionError::ModelAssumptionError;
};

// A symbolically nonzero divisor evaluates to zero at the chosen numeric values.
class NumericCollision : public ModelAssumptionError {
 public:
  using ModelAssumptionError::ModelAssumptionError;
};

// The field is outside the scope of the normal form theorem.
class HypothesisViolation : public std::runtime_error {
 public:
  HypothesisViolation(const std::string& what, std::string term = {})
      : std::runtime_error(what), term_(std::move(term)) {}
  const std::string& term() const { return term_; }

 private:
  std::string term_;
};

class ResonantTermInRange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonterminatingSeries : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AlreadyNormal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegratorDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rnf
