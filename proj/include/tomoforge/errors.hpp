#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace tomoforge {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  /// Short machine-readable tag, used by the CLI error JSON.
  virtual const char* kind() const noexcept { return "error"; }
};

#define TOMOFORGE_DEFINE_ERROR(Name, Tag)                      \
  class Name : public Error {                                  \
  public:                                                      \
    using Error::Error;                                        \
    const char* kind() const noexcept override { return Tag; } \
  };

TOMOFORGE_DEFINE_ERROR(ShapeError, "shape")
TOMOFORGE_DEFINE_ERROR(InvalidInputError, "invalid-input")
TOMOFORGE_DEFINE_ERROR(IndexError, "index")
TOMOFORGE_DEFINE_ERROR(ConsistencyError, "internal-consistency")
TOMOFORGE_DEFINE_ERROR(DataError, "data")
TOMOFORGE_DEFINE_ERROR(PropertyViolationError, "property-violation")
TOMOFORGE_DEFINE_ERROR(DegeneracyError, "numerical-degeneracy")
TOMOFORGE_DEFINE_ERROR(AccuracyError, "accuracy")
TOMOFORGE_DEFINE_ERROR(ResolutionError, "resolution")
TOMOFORGE_DEFINE_ERROR(DomainError, "domain")
TOMOFORGE_DEFINE_ERROR(ConfigError, "config")
TOMOFORGE_DEFINE_ERROR(PivotError, "pivot")
TOMOFORGE_DEFINE_ERROR(NoInformationError, "no-information")
TOMOFORGE_DEFINE_ERROR(IoError, "io")

#undef TOMOFORGE_DEFINE_ERROR

/// Least-squares inversion lacked full rank. Carries the directions (in the
/// unknown-component space) that the data did determine.
class UnderdeterminedError : public Error {
public:
  UnderdeterminedError(const std::string& msg, std::vector<Eigen::VectorXd> determined)
      : Error(msg), determined_directions(std::move(determined)) {}
  const char* kind() const noexcept override { return "under-determined"; }

  std::vector<Eigen::VectorXd> determined_directions;
};

}  // namespace tomoforge
