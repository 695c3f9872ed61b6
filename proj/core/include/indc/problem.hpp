#ifndef INDC_PROBLEM_HPP
#define INDC_PROBLEM_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <optional>
#include <string>

namespace indc {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Split right-hand side U' = F(U) + G(U), with G carrying the stiffness
/// (any 1/eps factor is already inside G for additive problems).
///
/// A problem may instead be partitioned: y' = f(y,z), eps z' = g(y,z), in
/// which case the state vector is the stacked [y; z] and the additive members
/// are unused. eps = 0 is allowed only in partitioned form (index-1 DAE).
///
/// Callables must be pure; problem objects are immutable and concurrently
/// evaluable.
struct SplitProblem {
  int dim = 0;
  std::string name;

  std::function<Vector(const Vector&)> explicit_rhs;                 // F
  std::function<Vector(const Vector&)> stiff_rhs;                    // G
  std::function<SparseMatrix(const Vector&)> stiff_jacobian;         // dG/dU, optional
  bool jacobian_constant = false;

  struct Partition {
    int ny = 0;
    int nz = 0;
    double epsilon = 1.0;
    std::function<Vector(const Vector& y, const Vector& z)> f;
    std::function<Vector(const Vector& y, const Vector& z)> g;
    std::function<Eigen::MatrixXd(const Vector& y, const Vector& z)> g_z;  // optional
  };
  std::optional<Partition> partition;

  std::function<Vector(double)> reference_solution;  // optional, t -> u

  bool partitioned() const { return partition.has_value(); }
  double epsilon() const { return partition ? partition->epsilon : 1.0; }

  Eigen::VectorBlock<const Vector> y_block(const Vector& u) const {
    return u.head(partition->ny);
  }
  Eigen::VectorBlock<const Vector> z_block(const Vector& u) const {
    return u.tail(partition->nz);
  }
};

/// Monotone per-integration effort counters; surfaced in the harness CSV.
struct WorkCounters {
  long newton_iterations = 0;
  long rhs_evaluations = 0;       // F and f
  long stiff_evaluations = 0;     // G and g
  long jacobian_evaluations = 0;

  WorkCounters& operator+=(const WorkCounters& o) {
    newton_iterations += o.newton_iterations;
    rhs_evaluations += o.rhs_evaluations;
    stiff_evaluations += o.stiff_evaluations;
    jacobian_evaluations += o.jacobian_evaluations;
    return *this;
  }
};

struct StepState {
  double t = 0.0;
  Vector u;
  WorkCounters work;
};

}  // namespace indc

#endif
