#include "indc/stepper.hpp"

#include <cmath>

#include "indc/errors.hpp"

namespace indc {

namespace {

bool row_is_zero(const Eigen::MatrixXd& a, int i) {
  return a.row(i).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

SparseMatrix AdditiveStageSolver::jacobian_fd(const Vector& u, WorkCounters& work) const {
  const int n = problem_->dim;
  Eigen::MatrixXd j(n, n);
  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  Vector up = u, um = u;
  for (int i = 0; i < n; ++i) {
    const double delta = sqrt_eps * (1.0 + std::abs(u(i)));
    up(i) = u(i) + delta;
    um(i) = u(i) - delta;
    j.col(i) = (problem_->stiff_rhs(up) - problem_->stiff_rhs(um)) / (2.0 * delta);
    work.stiff_evaluations += 2;
    up(i) = u(i);
    um(i) = u(i);
  }
  work.jacobian_evaluations += 1;
  return j.sparseView();
}

Vector AdditiveStageSolver::solve(const Vector& known, double coeff, const Vector& guess,
                                  WorkCounters& work) {
  auto residual = [&](const Vector& u) -> Vector {
    work.stiff_evaluations += 1;
    return u - known - coeff * problem_->stiff_rhs(u);
  };
  if (problem_->jacobian_constant && problem_->stiff_jacobian) {
    auto it = lu_cache_.find(coeff);
    if (it == lu_cache_.end()) {
      SparseMatrix jg = problem_->stiff_jacobian(known);
      work.jacobian_evaluations += 1;
      SparseMatrix m(problem_->dim, problem_->dim);
      m.setIdentity();
      m -= coeff * jg;
      auto lu = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
      lu->compute(m);
      if (lu->info() != Eigen::Success)
        throw SingularStageJacobian("stage solve: singular stage matrix");
      it = lu_cache_.emplace(coeff, std::move(lu)).first;
    }
    // Newton with a frozen (exact, constant) Jacobian.
    Vector x = guess;
    Vector r = residual(x);
    for (int iter = 0; iter < opts_.max_iterations; ++iter) {
      if (r.lpNorm<Eigen::Infinity>() <= opts_.tol * (1.0 + x.lpNorm<Eigen::Infinity>())) return x;
      x -= it->second->solve(r);
      r = residual(x);
      work.newton_iterations += 1;
    }
    if (r.lpNorm<Eigen::Infinity>() <= opts_.tol * (1.0 + x.lpNorm<Eigen::Infinity>())) return x;
    throw NewtonDiverged("stage solve did not converge");
  }
  auto jacobian = [&](const Vector& u) -> SparseMatrix {
    SparseMatrix jg;
    if (problem_->stiff_jacobian) {
      jg = problem_->stiff_jacobian(u);
      work.jacobian_evaluations += 1;
    } else {
      jg = jacobian_fd(u, work);
    }
    SparseMatrix m(problem_->dim, problem_->dim);
    m.setIdentity();
    m -= coeff * jg;
    return m;
  };
  NewtonResult res = newton_solve_sparse(residual, jacobian, guess, opts_);
  work.newton_iterations += res.iterations;
  return res.x;
}

ImexStepper::ImexStepper(ImexTableau tableau, const SplitProblem* problem, StepperOptions opts)
    : tableau_(validate(std::move(tableau))),
      problem_(problem),
      opts_(opts),
      stage_solver_(problem, opts.newton) {
  gsa_ = tableau_.gsa_flag;
}

Eigen::MatrixXd ImexStepper::gz_or_fd(const Vector& y, const Vector& z, WorkCounters& work) const {
  const auto& part = *problem_->partition;
  if (part.g_z) {
    work.jacobian_evaluations += 1;
    return part.g_z(y, z);
  }
  const int nz = part.nz;
  Eigen::MatrixXd j(nz, nz);
  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  Vector zp = z, zm = z;
  for (int i = 0; i < nz; ++i) {
    const double delta = sqrt_eps * (1.0 + std::abs(z(i)));
    zp(i) = z(i) + delta;
    zm(i) = z(i) - delta;
    j.col(i) = (part.g(y, zp) - part.g(y, zm)) / (2.0 * delta);
    work.stiff_evaluations += 2;
    zp(i) = z(i);
    zm(i) = z(i);
  }
  work.jacobian_evaluations += 1;
  return j;
}

StepState ImexStepper::step_additive(const StepState& s, double h) {
  const int ns = tableau_.stages();
  const auto& ex = tableau_.explicit_part;
  const auto& im = tableau_.implicit_part;
  WorkCounters work = s.work;

  std::vector<Vector> k(ns), l(ns), stage(ns);
  for (int i = 0; i < ns; ++i) {
    Vector known = s.u;
    for (int j = 0; j < i; ++j) {
      if (ex.a(i, j) != 0.0) known += h * ex.a(i, j) * k[j];
      if (im.a(i, j) != 0.0) known += h * im.a(i, j) * l[j];
    }
    const double aii = im.a(i, i);
    if (aii == 0.0) {
      stage[i] = known;
    } else {
      const Vector& guess = (i > 0) ? stage[i - 1] : s.u;
      stage[i] = stage_solver_.solve(known, h * aii, guess, work);
    }
    k[i] = problem_->explicit_rhs(stage[i]);
    l[i] = problem_->stiff_rhs(stage[i]);
    work.rhs_evaluations += 1;
    work.stiff_evaluations += 1;
  }

  StepState out;
  out.t = s.t + h;
  out.work = work;
  if (gsa_) {
    out.u = stage[ns - 1];
  } else {
    out.u = s.u;
    for (int i = 0; i < ns; ++i) {
      if (ex.b(i) != 0.0) out.u += h * ex.b(i) * k[i];
      if (im.b(i) != 0.0) out.u += h * im.b(i) * l[i];
    }
  }
  return out;
}

StepState ImexStepper::step_partitioned(const StepState& s, double h) {
  const auto& part = *problem_->partition;
  const double eps = part.epsilon;
  const int ns = tableau_.stages();
  const auto& ex = tableau_.explicit_part;
  const auto& im = tableau_.implicit_part;
  WorkCounters work = s.work;

  const Vector y_n = problem_->y_block(s.u);
  const Vector z_n = problem_->z_block(s.u);

  std::vector<Vector> yst(ns), zst(ns), fs(ns), gs(ns);
  for (int i = 0; i < ns; ++i) {
    Vector y = y_n;
    for (int j = 0; j < i; ++j)
      if (ex.a(i, j) != 0.0) y += h * ex.a(i, j) * fs[j];
    yst[i] = y;

    if (row_is_zero(im.a, i)) {
      zst[i] = z_n;
    } else if (im.a(i, i) == 0.0) {
      Vector acc = Vector::Zero(part.nz);
      for (int j = 0; j < i; ++j)
        if (im.a(i, j) != 0.0) acc += im.a(i, j) * gs[j];
      zst[i] = z_n + (h / eps) * acc;
    } else {
      Vector acc = Vector::Zero(part.nz);
      for (int j = 0; j < i; ++j)
        if (im.a(i, j) != 0.0) acc += im.a(i, j) * gs[j];
      const double aii = im.a(i, i);
      auto residual = [&](const Vector& z) -> Vector {
        work.stiff_evaluations += 1;
        return eps * (z - z_n) - h * acc - h * aii * part.g(yst[i], z);
      };
      auto jacobian = [&](const Vector& z) -> Eigen::MatrixXd {
        return eps * Eigen::MatrixXd::Identity(part.nz, part.nz) -
               h * aii * gz_or_fd(yst[i], z, work);
      };
      const Vector& guess = (i > 0) ? zst[i - 1] : z_n;
      NewtonResult res = newton_solve(residual, jacobian, guess, opts_.newton);
      work.newton_iterations += res.iterations;
      zst[i] = res.x;
    }
    fs[i] = part.f(yst[i], zst[i]);
    gs[i] = part.g(yst[i], zst[i]);
    work.rhs_evaluations += 1;
    work.stiff_evaluations += 1;
  }

  StepState out;
  out.t = s.t + h;
  out.work = work;
  out.u.resize(problem_->dim);
  if (gsa_) {
    out.u << yst[ns - 1], zst[ns - 1];
  } else {
    Vector y = y_n, z = z_n;
    for (int i = 0; i < ns; ++i) {
      if (ex.b(i) != 0.0) y += h * ex.b(i) * fs[i];
      if (im.b(i) != 0.0) z += (h / eps) * im.b(i) * gs[i];
    }
    out.u << y, z;
  }
  return out;
}

StepState ImexStepper::imex_step(const StepState& s, double h) {
  if (h <= 0.0) throw OutOfRange("imex_step: nonpositive step size");
  if (problem_->partitioned()) {
    if (problem_->partition->epsilon <= 0.0)
      throw OutOfRange("imex_step: partitioned step requires eps > 0 (use dae_step)");
    return step_partitioned(s, h);
  }
  return step_additive(s, h);
}

StepState ImexStepper::dae_step(const StepState& s, double h) {
  if (!problem_->partitioned()) throw OutOfRange("dae_step: requires a partitioned problem");
  if (!gsa_) throw RequiresGsa("dae_step: tableau is not globally stiffly accurate");
  const auto& part = *problem_->partition;
  const int ns = tableau_.stages();
  const auto& ex = tableau_.explicit_part;
  WorkCounters work = s.work;

  const Vector y_n = problem_->y_block(s.u);
  const Vector z_n = problem_->z_block(s.u);

  std::vector<Vector> yst(ns), zst(ns), fs(ns);
  for (int i = 0; i < ns; ++i) {
    Vector y = y_n;
    for (int j = 0; j < i; ++j)
      if (ex.a(i, j) != 0.0) y += h * ex.a(i, j) * fs[j];
    yst[i] = y;
    auto residual = [&](const Vector& z) -> Vector {
      work.stiff_evaluations += 1;
      return part.g(yst[i], z);
    };
    auto jacobian = [&](const Vector& z) -> Eigen::MatrixXd { return gz_or_fd(yst[i], z, work); };
    const Vector& guess = (i > 0) ? zst[i - 1] : z_n;
    NewtonResult res = newton_solve(residual, jacobian, guess, opts_.newton);
    work.newton_iterations += res.iterations;
    zst[i] = res.x;
    fs[i] = part.f(yst[i], zst[i]);
    work.rhs_evaluations += 1;
  }

  StepState out;
  out.t = s.t + h;
  out.work = work;
  out.u.resize(problem_->dim);
  out.u << yst[ns - 1], zst[ns - 1];
  return out;
}

StepState ImexStepper::step(const StepState& s, double h) {
  if (problem_->partitioned() && problem_->partition->epsilon == 0.0) return dae_step(s, h);
  return imex_step(s, h);
}

StepState ImexStepper::integrate(StepState s, double t1, double h,
                                 const std::function<void(const StepState&)>& on_step) {
  const double span = t1 - s.t;
  if (span == 0.0) return s;
  const double ratio = span / h;
  const long long n = std::llround(ratio);
  if (n <= 0 || std::abs(ratio - static_cast<double>(n)) > 1e-8 * std::max(1.0, std::abs(ratio)))
    throw OutOfRange("integrate: (t1 - t0)/h is not an integer");
  for (long long i = 0; i < n; ++i) {
    try {
      s = step(s, h);
    } catch (const Error& e) {
      throw Error("integrate: step " + std::to_string(i) + ": " + e.what());
    }
    if (on_step) on_step(s);
  }
  s.t = t1;  // guard accumulated roundoff in t
  return s;
}

}  // namespace indc
