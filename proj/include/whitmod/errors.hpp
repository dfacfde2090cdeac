#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace whitmod {

// Error kinds map onto the CLI exit codes: Config/Domain -> 2, Numerical -> 1,
// BlowUp -> 3.  Library code throws; only the CLI layer translates to codes.
enum class ErrorKind { Config, Domain, Numerical, BlowUp };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Configuration problems: malformed input, invalid parameters, bad requests.
struct ConfigError : Error {
  explicit ConfigError(std::string m) : Error(ErrorKind::Config, std::move(m)) {}
};

// A requested time step above the documented stability bound.
struct UnstableStep : Error {
  explicit UnstableStep(std::string m) : Error(ErrorKind::Config, std::move(m)) {}
};

// Domain errors: the request is well formed but the point lies outside the
// region where the model (or a closed form) exists.
struct OutsideDomain : Error {
  explicit OutsideDomain(std::string m) : Error(ErrorKind::Domain, std::move(m)) {}
};
struct NonexistentWavetrain : Error {
  explicit NonexistentWavetrain(std::string m)
      : Error(ErrorKind::Domain, std::move(m)) {}
};
struct InvalidBranch : Error {
  explicit InvalidBranch(std::string m) : Error(ErrorKind::Domain, std::move(m)) {}
};
struct EllipticSide : Error {
  explicit EllipticSide(std::string m) : Error(ErrorKind::Domain, std::move(m)) {}
};
struct NoSolitaryWave : Error {
  explicit NoSolitaryWave(std::string m)
      : Error(ErrorKind::Domain, std::move(m)) {}
};

// Numerical failures.
struct NumericalError : Error {
  explicit NumericalError(std::string m)
      : Error(ErrorKind::Numerical, std::move(m)) {}
};
struct SingularLeadingCoefficient : NumericalError {
  explicit SingularLeadingCoefficient(std::string m)
      : NumericalError(std::move(m)) {}
};
struct DegenerateRoot : NumericalError {
  explicit DegenerateRoot(std::string m) : NumericalError(std::move(m)) {}
};
struct NotARoot : NumericalError {
  explicit NotARoot(std::string m) : NumericalError(std::move(m)) {}
};
struct NoConvergence : NumericalError {
  explicit NoConvergence(std::string m) : NumericalError(std::move(m)) {}
};
struct HigherDegeneracy : NumericalError {
  explicit HigherDegeneracy(std::string m) : NumericalError(std::move(m)) {}
};
struct NotSolvable : NumericalError {
  explicit NotSolvable(std::string m) : NumericalError(std::move(m)) {}
};
struct ChainTerminationFailure : NumericalError {
  explicit ChainTerminationFailure(std::string m)
      : NumericalError(std::move(m)) {}
};
struct DegenerateDenominator : NumericalError {
  explicit DegenerateDenominator(std::string m)
      : NumericalError(std::move(m)) {}
};
struct NoSplitDetected : NumericalError {
  explicit NoSplitDetected(std::string m) : NumericalError(std::move(m)) {}
};
struct SymmetryViolation : NumericalError {
  explicit SymmetryViolation(std::string m) : NumericalError(std::move(m)) {}
};

// Solution blow-up during time integration.  Physical for the equations we
// simulate, so it carries the time reached; subclasses may attach state.
class BlowUpError : public Error {
 public:
  BlowUpError(double time, std::string m)
      : Error(ErrorKind::BlowUp, std::move(m)), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// A coefficient required nonzero by the reduction vanished.  `which` names it.
class DegenerateCoefficient : public NumericalError {
 public:
  DegenerateCoefficient(std::string which, std::string m)
      : NumericalError(std::move(m)), which_(std::move(which)) {}
  const std::string& which() const { return which_; }

 private:
  std::string which_;
};

}  // namespace whitmod
