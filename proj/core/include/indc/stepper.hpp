#ifndef INDC_STEPPER_HPP
#define INDC_STEPPER_HPP

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "indc/newton.hpp"
#include "indc/problem.hpp"
#include "indc/tableau.hpp"

namespace indc {

struct StepperOptions {
  NewtonOptions newton;
};

/// Newton solve of U - known - coeff * G(U) = 0, the shape of every
/// diagonally implicit stage of an additive problem. Factorizations of
/// I - coeff * dG are cached per coefficient when the Jacobian is constant.
class AdditiveStageSolver {
 public:
  AdditiveStageSolver(const SplitProblem* problem, NewtonOptions opts)
      : problem_(problem), opts_(opts) {}

  Vector solve(const Vector& known, double coeff, const Vector& guess, WorkCounters& work);

 private:
  SparseMatrix jacobian_fd(const Vector& u, WorkCounters& work) const;

  const SplitProblem* problem_;
  NewtonOptions opts_;
  std::map<double, std::unique_ptr<Eigen::SparseLU<SparseMatrix>>> lu_cache_;
};

/// One-step IMEX integrator for a validated double tableau on a split
/// problem. Handles both additive and partitioned problems; partitioned
/// eps = 0 steps go through the DAE path (GSA tableaus only).
///
/// A stepper owns per-integration scratch (stage buffers, factorization
/// cache) and must not be shared between concurrent integrations; distinct
/// instances may run concurrently.
class ImexStepper {
 public:
  ImexStepper(ImexTableau tableau, const SplitProblem* problem, StepperOptions opts = {});

  /// Dispatches to imex_step or dae_step depending on the problem.
  StepState step(const StepState& s, double h);

  /// One IMEX step: explicit accumulation for F/f, diagonally implicit
  /// Newton solves for G/g. Requires eps > 0 for partitioned problems.
  StepState imex_step(const StepState& s, double h);

  /// eps = 0 limit: explicit RK update of y with each Z_i recovered from
  /// g(Y_i, Z_i) = 0; the output z is the last stage (GSA required).
  StepState dae_step(const StepState& s, double h);

  /// Fixed-step integration from s.t to t1; (t1 - s.t)/h must be integral.
  StepState integrate(StepState s, double t1, double h,
                      const std::function<void(const StepState&)>& on_step = {});

  const ImexTableau& tableau() const { return tableau_; }
  const StepperOptions& options() const { return opts_; }

  /// Jacobian of the partitioned stiff block, user closure or central
  /// differences.
  Eigen::MatrixXd gz_or_fd(const Vector& y, const Vector& z, WorkCounters& work) const;

 private:
  StepState step_additive(const StepState& s, double h);
  StepState step_partitioned(const StepState& s, double h);

  ImexTableau tableau_;
  const SplitProblem* problem_;
  StepperOptions opts_;
  bool gsa_ = false;
  AdditiveStageSolver stage_solver_;
};

}  // namespace indc

#endif
