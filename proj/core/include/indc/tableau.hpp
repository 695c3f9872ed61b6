#ifndef INDC_TABLEAU_HPP
#define INDC_TABLEAU_HPP

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "indc/rational.hpp"

namespace indc {

/// One Butcher tableau (A, b, c). Entries are kept in double precision for
/// the integrators plus, when the scheme is rational, an exact mirror used by
/// golden-file comparisons and exact assembly.
struct RkTableau {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;

  std::optional<RatMatrix> a_rat;
  std::optional<RatVector> b_rat;
  std::optional<RatVector> c_rat;

  int stages() const { return static_cast<int>(b.size()); }
  bool is_rational() const { return a_rat.has_value(); }
};

/// IMEX classification by the implicit matrix (see classify()).
enum class ImexType { TypeA, TypeCK, TypeARS, Other };

std::string to_string(ImexType t);

/// Double Butcher tableau: explicit part (Ã, b̃, c̃) paired with a diagonally
/// implicit part (A, b, c). Immutable value type; all operations on it are
/// pure functions.
struct ImexTableau {
  RkTableau explicit_part;
  RkTableau implicit_part;
  std::string name;
  int order = 0;        // classical order p
  bool gsa_flag = false;  // declared GSA property; validate() cross-checks

  int stages() const { return explicit_part.stages(); }
  bool is_rational() const {
    return explicit_part.is_rational() && implicit_part.is_rational();
  }
};

/// Checks dimension consistency, triangularity, row-sum/abscissa consistency
/// (exact for rational entries, 1e-13 otherwise), abscissae in [0,1], and the
/// declared GSA flag. Returns the tableau unchanged on success.
ImexTableau validate(ImexTableau t);

/// TypeA:  implicit A invertible and c̃ ≠ c.
/// TypeCK: zero first implicit row, invertible lower-right submatrix, c̃ = c.
/// TypeARS: TypeCK with zero first implicit column.
/// Invertibility is judged by |det| > 1e-12 after scaling rows to unit max.
ImexType classify(const ImexTableau& t);

/// b^T equals the last row of A, b̃^T the last row of Ã, and c_s = c̃_s = 1.
bool is_gsa(const ImexTableau& t);

/// R(inf) = 1 - b^T A^{-1} 1 of the implicit stability function. For type-CK
/// structure (zero first row) the first stage is eliminated and the formula
/// applied to the invertible subsystem. Throws SingularMatrix otherwise.
double r_infinity(const RkTableau& implicit_part);

/// Stability function R(z) = 1 + z b^T (I - zA)^{-1} 1 of an implicit
/// tableau, evaluated at finite z. Used as a numerical cross-check of
/// r_infinity at large negative z.
double stability_function(const RkTableau& implicit_part, double z);

/// The six schemes used throughout: IMEX1-GSA-ARS, IMEX1-GSA-A, IMEX1-NGSA-A,
/// IMEX2-ARS, IMEX2-CK, IMEX3-ARS.
std::vector<ImexTableau> builtin_catalog();

/// Case-insensitive lookup, accepting short aliases like "imex1-ars".
ImexTableau find_scheme(const std::string& name);

enum class TableauFormat { Rational, Decimal };

/// Structured text block: stage count, then rows of Ã, b̃, c̃, A, b, c as
/// decimal or rational "p/q" literals. Round-trips the catalog exactly.
std::string emit_tableau(const ImexTableau& t, TableauFormat format);
ImexTableau parse_tableau(const std::string& text);

/// Entrywise exact comparison of the rational mirrors. Both tableaus must be
/// rational.
bool exactly_equal(const ImexTableau& a, const ImexTableau& b);

}  // namespace indc

#endif
