#ifndef HIV_ERRORS_HPP
#define HIV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hiv {

/// Non-finite or out-of-range input (bad state component, control outside [0,1], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A closed-form expression would divide by a vanishing parameter combination.
class SingularParameterError : public std::runtime_error {
 public:
  explicit SingularParameterError(std::string quantity)
      : std::runtime_error("singular parameters: " + quantity + " vanishes"),
        quantity_(std::move(quantity)) {}

  const std::string& quantity() const noexcept { return quantity_; }

 private:
  std::string quantity_;
};

/// Eigenvalue failure or equilibrium residual above tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Analytic and numeric stability verdicts contradict each other.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Caller broke an operation precondition (e.g. objective of a trajectory without controls).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid configuration document; carries the offending field path.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Output could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hiv

#endif  // HIV_ERRORS_HPP
