#ifndef INDC_RATIONAL_HPP
#define INDC_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

#include "indc/errors.hpp"

namespace indc {

/// Arbitrary-precision rational scalar. All exact tableau/quadrature
/// arithmetic runs on this type; conversion to double happens once at the
/// edges.
using Rational = boost::multiprecision::cpp_rational;

using RatVector = std::vector<Rational>;
using RatMatrix = std::vector<RatVector>;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

RatMatrix rat_zeros(int rows, int cols);

/// Determinant by fraction-free Gaussian elimination; exact.
Rational rat_determinant(RatMatrix a);

/// Solves a x = rhs in exact arithmetic. Throws SingularMatrix.
RatVector rat_solve(RatMatrix a, RatVector rhs);

/// Parses "p/q" or "p" (integer) literals.
Rational parse_rational(const std::string& text);

/// "p/q" for non-integers, "p" otherwise.
std::string format_rational(const Rational& r);

}  // namespace indc

#endif
