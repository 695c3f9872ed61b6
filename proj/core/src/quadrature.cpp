#include "indc/quadrature.hpp"

#include <cmath>

#include "indc/errors.hpp"

namespace indc {

namespace {

// p(theta) * (theta - root)
RatVector multiply_linear(const RatVector& p, const Rational& root) {
  RatVector out(p.size() + 1, Rational(0));
  for (size_t i = 0; i < p.size(); ++i) {
    out[i + 1] += p[i];
    out[i] -= root * p[i];
  }
  return out;
}

Rational eval_poly(const RatVector& coeff, const Rational& x) {
  Rational acc(0);
  for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double eval_poly(const Eigen::VectorXd& coeff, double x) {
  double acc = 0.0;
  for (int i = static_cast<int>(coeff.size()) - 1; i >= 0; --i) acc = acc * x + coeff(i);
  return acc;
}

}  // namespace

QuadratureSet build_quadrature(int m) {
  if (m <= 0) throw InvalidM("build_quadrature: M must be positive");
  if (m > 32) throw InvalidM("build_quadrature: M > 32 rejected (rational coefficient growth)");

  QuadratureSet q;
  q.m_ = m;
  q.nodes_.resize(m);
  for (int l = 0; l < m; ++l) q.nodes_[l] = Rational(l + 1, m);

  q.basis_.resize(m);
  q.antideriv_.resize(m);
  q.basis_d_.resize(m);
  q.antideriv_d_.resize(m);
  for (int l = 1; l <= m; ++l) {
    RatVector poly{Rational(1)};
    Rational denom(1);
    for (int j = 1; j <= m; ++j) {
      if (j == l) continue;
      poly = multiply_linear(poly, Rational(j));
      denom *= Rational(l - j);
    }
    for (auto& c : poly) c /= denom;
    RatVector anti(poly.size() + 1, Rational(0));
    for (size_t i = 0; i < poly.size(); ++i) anti[i + 1] = poly[i] / Rational(static_cast<int>(i) + 1);
    q.basis_[l - 1] = poly;
    q.antideriv_[l - 1] = anti;
    Eigen::VectorXd pd(poly.size()), ad(anti.size());
    for (size_t i = 0; i < poly.size(); ++i) pd(static_cast<int>(i)) = to_double(poly[i]);
    for (size_t i = 0; i < anti.size(); ++i) ad(static_cast<int>(i)) = to_double(anti[i]);
    q.basis_d_[l - 1] = pd;
    q.antideriv_d_[l - 1] = ad;
  }

  q.s_sub_rat_ = rat_zeros(m, m);
  q.s_cum_rat_ = rat_zeros(m, m);
  q.s_sub_d_ = Eigen::MatrixXd::Zero(m, m);
  q.s_cum_d_ = Eigen::MatrixXd::Zero(m, m);
  const Rational inv_m(1, m);
  for (int row = 0; row < m; ++row) {
    for (int l = 0; l < m; ++l) {
      const Rational integral =
          (eval_poly(q.antideriv_[l], Rational(row + 1)) - eval_poly(q.antideriv_[l], Rational(row))) *
          inv_m;
      q.s_sub_rat_[row][l] = integral;
      q.s_cum_rat_[row][l] = integral + (row > 0 ? q.s_cum_rat_[row - 1][l] : Rational(0));
      q.s_sub_d_(row, l) = to_double(q.s_sub_rat_[row][l]);
      q.s_cum_d_(row, l) = to_double(q.s_cum_rat_[row][l]);
    }
  }
  return q;
}

QuadratureSet::StageRowsExact QuadratureSet::stage_row_exact(int m, const Rational& chi) const {
  if (m < 0 || m >= m_) throw OutOfRange("stage_row: substep index outside [0, M-1]");
  if (chi < 0 || chi > 1) throw OutOfRange("stage_row: abscissa outside [0,1]");
  StageRowsExact rows;
  rows.integration.resize(m_);
  rows.interpolation.resize(m_);
  const Rational theta = Rational(m) + chi;
  const Rational inv_m(1, m_);
  for (int l = 0; l < m_; ++l) {
    rows.integration[l] =
        (eval_poly(antideriv_[l], theta) - eval_poly(antideriv_[l], Rational(m))) * inv_m;
    rows.interpolation[l] = eval_poly(basis_[l], theta);
  }
  return rows;
}

QuadratureSet::StageRows QuadratureSet::stage_row(int m, double chi) const {
  if (m < 0 || m >= m_) throw OutOfRange("stage_row: substep index outside [0, M-1]");
  if (chi < -1e-13 || chi > 1.0 + 1e-13) throw OutOfRange("stage_row: abscissa outside [0,1]");
  StageRows rows;
  rows.integration.resize(m_);
  rows.interpolation.resize(m_);
  const double theta = m + chi;
  for (int l = 0; l < m_; ++l) {
    rows.integration(l) =
        (eval_poly(antideriv_d_[l], theta) - eval_poly(antideriv_d_[l], double(m))) / m_;
    rows.interpolation(l) = eval_poly(basis_d_[l], theta);
  }
  return rows;
}

double QuadratureSet::interpolate(std::span<const double> values, double theta) const {
  if (static_cast<int>(values.size()) != m_)
    throw DimensionMismatch("interpolate: expected exactly M node values");
  double acc = 0.0;
  for (int l = 0; l < m_; ++l) acc += values[l] * eval_poly(basis_d_[l], theta);
  return acc;
}

Eigen::RowVectorXd QuadratureSet::basis_at(double theta) const {
  Eigen::RowVectorXd row(m_);
  for (int l = 0; l < m_; ++l) row(l) = eval_poly(basis_d_[l], theta);
  return row;
}

QuadratureSet::StageRows stage_rows_auto(const QuadratureSet& quad, int m, double chi,
                                         const Rational* chi_exact) {
  constexpr double kNodeTol = 1e-14;
  Rational chi_rat;
  bool exact = false;
  if (chi_exact) {
    chi_rat = *chi_exact;
    exact = true;
  } else if (std::abs(chi) <= kNodeTol) {
    chi_rat = 0;
    exact = true;
  } else if (std::abs(chi - 1.0) <= kNodeTol) {
    chi_rat = 1;
    exact = true;
  }
  if (exact) {
    auto r = quad.stage_row_exact(m, chi_rat);
    QuadratureSet::StageRows out;
    const int n = quad.num_nodes();
    out.integration.resize(n);
    out.interpolation.resize(n);
    for (int l = 0; l < n; ++l) {
      out.integration(l) = to_double(r.integration[l]);
      out.interpolation(l) = to_double(r.interpolation[l]);
    }
    return out;
  }
  return quad.stage_row(m, chi);
}

}  // namespace indc
