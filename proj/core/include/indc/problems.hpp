#ifndef INDC_PROBLEMS_HPP
#define INDC_PROBLEMS_HPP

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <string>

#include "indc/problem.hpp"
#include "indc/spatial.hpp"

namespace indc {

/// A benchmark with its well-prepared initial data.
struct TestProblem {
  SplitProblem problem;
  Vector initial;
  std::string key;
};

/// y' = z, eps z' = (1-y^2) z - y with y(0) = 2 and z(0) well prepared to
/// O(eps^3). Partitioned; eps = 0 gives the reduced index-1 DAE.
TestProblem van_der_pol_problem(double eps);

/// Pointwise description of a 2x2 hyperbolic relaxation system
///   u_t + f1(u,v)_x = 0,  v_t + f2(u,v)_x = (1/eps) g(u,v),
/// with local equilibrium v = q(u). Construction checks g(u, q(u)) = 0 on
/// samples and that char_speed bounds the flux Jacobian's spectral radius.
struct RelaxationSystem {
  std::string name;
  double epsilon = 1.0;
  std::function<double(double u, double v)> flux_u, flux_v;
  std::function<double(double u, double v)> source;  // g, without the 1/eps factor
  std::function<double(double u)> equilibrium;       // q(u)
  std::function<double(double u, double v)> char_speed;
  std::function<double(double u, double v)> source_du, source_dv;
  bool source_linear = false;
  std::pair<double, double> sample_range{0.0, 1.0};  // u-range for the construction checks
};

/// Method-of-lines discretization of a RelaxationSystem on a periodic grid:
/// WENO5 fluxes explicit, pointwise source implicit. State is stacked [u; v].
TestProblem relaxation_mol_problem(const Grid1D& grid, const RelaxationSystem& sys,
                                   const Vector& u0, const Vector& v0, const std::string& key);

/// u_t + (u^2/2)_x = (1/R) u_xx, periodic on [0,1], u(x,0) = sin(pi x).
/// WENO5 convection explicit, fourth-order diffusion implicit.
TestProblem burgers_problem(const Grid1D& grid, double reynolds);

/// u_t + v_x = 0, v_t + u_x = -(1/eps)(v - b u) on [0,2] with well-prepared
/// data for u0 = sin(2 pi x); carries the exact single-mode Fourier solution.
/// Throws SubcharacteristicViolated for |b| > 1.
TestProblem linear_relaxation_problem(const Grid1D& grid, double b, double eps);

/// h_t + w_x = 0, w_t + (h + 0.5 h^2)_x = -(1/eps)(w - 0.5 h^2) on [0,1]
/// with h(0,x) = 1 + 0.2 sin(8 pi x) and w well prepared to O(eps^2).
TestProblem nonlinear_relaxation_problem(const Grid1D& grid, double eps);

/// 2x2 mode system of the linear relaxation problem for wavenumber xi.
Eigen::Matrix2cd linear_relaxation_mode_matrix(double xi, double b, double eps);
Eigen::Vector2cd linear_relaxation_mode_initial(double xi, double b, double eps);

/// Matrix exponential exp(a*t) of a complex 2x2 (closed-form eigenvalues).
Eigen::Matrix2cd expm2(const Eigen::Matrix2cd& a, double t);

}  // namespace indc

#endif
