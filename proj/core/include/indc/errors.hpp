#ifndef INDC_ERRORS_HPP
#define INDC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace indc {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

/// Row-sum / abscissa consistency violated; carries the offending row (0-based).
struct AbscissaInconsistent : Error {
  int row;
  AbscissaInconsistent(const std::string& msg, int row_) : Error(msg), row(row_) {}
};

struct NotTriangular : Error {
  using Error::Error;
};

struct SingularMatrix : Error {
  using Error::Error;
};

struct InvalidM : Error {
  using Error::Error;
};

struct OutOfRange : Error {
  using Error::Error;
};

struct NewtonDiverged : Error {
  using Error::Error;
};

struct SingularStageJacobian : Error {
  using Error::Error;
};

struct RequiresGsa : Error {
  using Error::Error;
};

struct TooLarge : Error {
  using Error::Error;
};

struct UnsupportedStructure : Error {
  using Error::Error;
};

struct SubcharacteristicViolated : Error {
  using Error::Error;
};

struct StencilTooSmall : Error {
  using Error::Error;
};

struct InsufficientData : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace indc

#endif
