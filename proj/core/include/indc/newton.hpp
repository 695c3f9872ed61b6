#ifndef INDC_NEWTON_HPP
#define INDC_NEWTON_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>

#include "indc/problem.hpp"

namespace indc {

struct NewtonOptions {
  double tol = 1e-12;   // relative: ||r||_inf <= tol * (1 + ||v||_inf)
  int max_iterations = 50;
  int max_halvings = 8;
};

struct NewtonResult {
  Vector x;
  int iterations = 0;
};

/// Damped Newton iteration on residual(v) = 0 with a dense Jacobian. The full
/// step is halved (up to max_halvings) while it fails to reduce the residual
/// norm. Throws NewtonDiverged / SingularStageJacobian.
NewtonResult newton_solve(const std::function<Vector(const Vector&)>& residual,
                          const std::function<Eigen::MatrixXd(const Vector&)>& jacobian,
                          const Vector& guess, const NewtonOptions& opts = {});

/// Same contract with a sparse Jacobian (stage solves of method-of-lines
/// problems).
NewtonResult newton_solve_sparse(const std::function<Vector(const Vector&)>& residual,
                                 const std::function<SparseMatrix(const Vector&)>& jacobian,
                                 const Vector& guess, const NewtonOptions& opts = {});

}  // namespace indc

#endif
