#ifndef INDC_SPATIAL_HPP
#define INDC_SPATIAL_HPP

#include <Eigen/Dense>

#include <functional>

#include "indc/problem.hpp"

namespace indc {

/// Periodic uniform 1D grid with point values at x_i = a + i*dx, i = 0..N-1.
struct Grid1D {
  int n = 0;
  double a = 0.0, b = 1.0;
  bool periodic = true;

  double dx() const { return (b - a) / n; }
  double x(int i) const { return a + i * dx(); }
};

/// Throws StencilTooSmall below the WENO5 minimum of 8 cells.
Grid1D make_grid(int n, double a, double b);

/// Fifth-order WENO reconstruction of cell values at the right interface
/// x_{j+1/2}, left-biased (upwind for positive speeds), periodic.
Eigen::VectorXd weno5_reconstruct_left(const Eigen::VectorXd& v);

/// Mirror-image reconstruction at x_{j+1/2} from the right (negative speeds).
Eigen::VectorXd weno5_reconstruct_right(const Eigen::VectorXd& v);

/// Conservative finite-difference approximation of -d(flux)/dx, componentwise
/// global Lax-Friedrichs splitting f± = (f ± alpha*u)/2 with WENO5
/// reconstruction of each split flux. state and the returned derivative are
/// (components x N); flux maps the full state to per-cell flux values.
Eigen::MatrixXd weno5_flux_derivative(
    const Grid1D& grid, const Eigen::MatrixXd& state,
    const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& flux, double alpha);

/// Standard fourth-order central second derivative
/// (-1/12, 4/3, -5/2, 4/3, -1/12)/dx^2, periodic.
Eigen::VectorXd d4_second_derivative(const Grid1D& grid, const Eigen::VectorXd& u);

/// The same operator as a (banded-circulant) sparse matrix.
SparseMatrix d4_matrix(const Grid1D& grid);

}  // namespace indc

#endif
