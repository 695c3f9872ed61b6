#ifndef INDC_QUADRATURE_HPP
#define INDC_QUADRATURE_HPP

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "indc/rational.hpp"

namespace indc {

/// Uniform quadrature nodes tau_m = m/M, m = 1..M, on the unit interval (the
/// left endpoint is excluded). Carries the per-substep integration matrix
/// S_sub, the cumulative matrix S_cum, and the Lagrange basis needed for
/// per-stage integration/interpolation rows.
///
/// Normalization: all stored integration rows measure integrals over the
/// unit interval, so row m of S_sub sums to 1/M (one substep) and the last
/// row of S_cum sums to 1. Multiplying by M expresses the same rows in
/// substep units.
///
/// Immutable after build; safe for unsynchronized concurrent reads.
class QuadratureSet {
 public:
  struct StageRows {
    Eigen::RowVectorXd integration;    // (1/M) * int_{m}^{m+chi} alpha_l
    Eigen::RowVectorXd interpolation;  // alpha_l(m + chi)
  };
  struct StageRowsExact {
    RatVector integration;
    RatVector interpolation;
  };

  int num_nodes() const { return m_; }
  const RatVector& nodes() const { return nodes_; }
  const RatMatrix& s_sub_exact() const { return s_sub_rat_; }
  const RatMatrix& s_cum_exact() const { return s_cum_rat_; }
  const Eigen::MatrixXd& s_sub() const { return s_sub_d_; }
  const Eigen::MatrixXd& s_cum() const { return s_cum_d_; }

  /// Integration and interpolation rows for a stage at tau_m + chi*h,
  /// chi in [0,1], 0 <= m <= M-1. The rational overload is exact; chi = 1
  /// reproduces S_sub row m bit-for-bit.
  StageRows stage_row(int m, double chi) const;
  StageRowsExact stage_row_exact(int m, const Rational& chi) const;

  /// Evaluates the degree-(M-1) interpolant of the node values at theta in
  /// [0, M] (substep units; the nodes sit at theta = 1..M).
  double interpolate(std::span<const double> values, double theta) const;

  /// alpha_l(theta) for all l, theta in substep units.
  Eigen::RowVectorXd basis_at(double theta) const;

 private:
  friend QuadratureSet build_quadrature(int m);

  int m_ = 0;
  RatVector nodes_;
  RatMatrix s_sub_rat_, s_cum_rat_;
  Eigen::MatrixXd s_sub_d_, s_cum_d_;
  std::vector<RatVector> basis_;       // alpha_l coefficients, ascending powers of theta
  std::vector<RatVector> antideriv_;   // int alpha_l, ascending powers, zero constant term
  std::vector<Eigen::VectorXd> basis_d_, antideriv_d_;
};

/// Exact rational construction. Throws InvalidM for M <= 0 or M > 32.
QuadratureSet build_quadrature(int m);

/// Stage rows with the exact path taken whenever the abscissa is exactly
/// representable (a rational tableau entry, or 0/1). The loop integrator and
/// the tableau assembler both come through here so they see identical double
/// values.
QuadratureSet::StageRows stage_rows_auto(const QuadratureSet& quad, int m, double chi,
                                         const Rational* chi_exact);

}  // namespace indc

#endif
