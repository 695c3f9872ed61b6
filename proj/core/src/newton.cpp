#include "indc/newton.hpp"

#include <cmath>

#include "indc/errors.hpp"

namespace indc {

namespace {

template <class Jacobian, class Solve>
NewtonResult newton_core(const std::function<Vector(const Vector&)>& residual,
                         const Jacobian& jacobian, const Solve& solve_linear,
                         const Vector& guess, const NewtonOptions& opts) {
  Vector x = guess;
  if (!x.allFinite()) throw NewtonDiverged("newton: non-finite initial guess");
  Vector r = residual(x);
  double rnorm = r.lpNorm<Eigen::Infinity>();
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    if (rnorm <= opts.tol * (1.0 + x.lpNorm<Eigen::Infinity>()))
      return NewtonResult{x, iter - 1};
    Vector delta = solve_linear(jacobian(x), r);
    if (!delta.allFinite()) throw SingularStageJacobian("newton: linear solve produced non-finite step");
    double lambda = 1.0;
    Vector x_new;
    Vector r_new;
    double rnorm_new = 0.0;
    for (int halving = 0;; ++halving) {
      x_new = x - lambda * delta;
      r_new = residual(x_new);
      rnorm_new = r_new.lpNorm<Eigen::Infinity>();
      if (std::isfinite(rnorm_new) && rnorm_new < rnorm) break;
      if (halving >= opts.max_halvings) break;  // accept the damped step and keep iterating
      lambda *= 0.5;
    }
    x = x_new;
    r = r_new;
    rnorm = rnorm_new;
    if (!std::isfinite(rnorm)) throw NewtonDiverged("newton: residual became non-finite");
  }
  if (rnorm <= opts.tol * (1.0 + x.lpNorm<Eigen::Infinity>()))
    return NewtonResult{x, opts.max_iterations};
  throw NewtonDiverged("newton: no convergence after " + std::to_string(opts.max_iterations) +
                       " iterations (residual " + std::to_string(rnorm) + ")");
}

}  // namespace

NewtonResult newton_solve(const std::function<Vector(const Vector&)>& residual,
                          const std::function<Eigen::MatrixXd(const Vector&)>& jacobian,
                          const Vector& guess, const NewtonOptions& opts) {
  auto solve = [](const Eigen::MatrixXd& j, const Vector& rhs) -> Vector {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(j);
    Vector d = lu.solve(rhs);
    if (!d.allFinite()) throw SingularStageJacobian("newton: singular stage Jacobian");
    return d;
  };
  return newton_core(residual, jacobian, solve, guess, opts);
}

NewtonResult newton_solve_sparse(const std::function<Vector(const Vector&)>& residual,
                                 const std::function<SparseMatrix(const Vector&)>& jacobian,
                                 const Vector& guess, const NewtonOptions& opts) {
  auto solve = [](const SparseMatrix& j, const Vector& rhs) -> Vector {
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(j);
    if (lu.info() != Eigen::Success) throw SingularStageJacobian("newton: singular stage Jacobian");
    Vector d = lu.solve(rhs);
    if (!d.allFinite()) throw SingularStageJacobian("newton: singular stage Jacobian");
    return d;
  };
  return newton_core(residual, jacobian, solve, guess, opts);
}

}  // namespace indc
