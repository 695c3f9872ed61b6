#include "indc/indc.hpp"

#include <cmath>

#include "indc/errors.hpp"

namespace indc {

namespace {
constexpr double kNodeTol = 1e-14;
}  // namespace

IndcScheme::IndcScheme(ImexTableau base, int num_nodes, int corrections,
                       std::vector<ImexTableau> correction_bases)
    : m_(num_nodes), k_(corrections), quad_(build_quadrature(num_nodes)) {
  if (num_nodes < 1 || num_nodes > 32) throw InvalidM("IndcScheme: M must be in [1, 32]");
  if (corrections < 0) throw OutOfRange("IndcScheme: K must be nonnegative");
  bases_.push_back(validate(std::move(base)));
  if (!correction_bases.empty()) {
    if (static_cast<int>(correction_bases.size()) != corrections)
      throw DimensionMismatch("IndcScheme: need one correction base per sweep");
    for (auto& t : correction_bases) bases_.push_back(validate(std::move(t)));
  }

  rows_.resize(bases_.size());
  for (size_t bi = 0; bi < bases_.size(); ++bi) {
    const auto& tab = bases_[bi];
    const int ns = tab.stages();
    rows_[bi].resize(m_);
    for (int m = 0; m < m_; ++m) {
      rows_[bi][m].resize(ns);
      for (int i = 0; i < ns; ++i) {
        StageRows sr;
        const auto& ex = tab.explicit_part;
        const auto& im = tab.implicit_part;
        const Rational* cr_ex = ex.c_rat ? &(*ex.c_rat)[i] : nullptr;
        const Rational* cr_im = im.c_rat ? &(*im.c_rat)[i] : nullptr;
        auto r_ex = stage_rows_auto(quad_, m, ex.c(i), cr_ex);
        auto r_im = stage_rows_auto(quad_, m, im.c(i), cr_im);
        sr.s_ex = r_ex.integration;
        sr.p_ex = r_ex.interpolation;
        sr.s_im = r_im.integration;
        sr.p_im = r_im.interpolation;
        sr.ex_at_left_node = std::abs(ex.c(i)) <= kNodeTol;
        sr.im_row_zero = im.a.row(i).cwiseAbs().maxCoeff() == 0.0;
        rows_[bi][m][i] = std::move(sr);
      }
    }
  }
}

int IndcScheme::predicted_order() const {
  int sum = 0;
  for (int k = 0; k <= k_; ++k) sum += base_for_sweep(k).order;
  return std::min(sum, m_);
}

std::string IndcScheme::label() const {
  return "InDC-" + base().name + "-" + std::to_string(m_) + "-" + std::to_string(k_);
}

IndcIntegrator::IndcIntegrator(IndcScheme scheme, const SplitProblem* problem, StepperOptions opts)
    : scheme_(std::move(scheme)),
      problem_(problem),
      opts_(opts),
      predictor_(scheme_.base(), problem, opts) {}

NodeSweep IndcIntegrator::predict(const StepState& s, double big_h) {
  const int m_nodes = scheme_.num_nodes();
  const double h = big_h / m_nodes;
  NodeSweep sweep;
  sweep.u.resize(m_nodes + 1);
  sweep.f.resize(m_nodes + 1);
  sweep.g.resize(m_nodes + 1);
  sweep.u[0] = s.u;
  StepState state{s.t, s.u, {}};
  for (int m = 0; m < m_nodes; ++m) {
    try {
      state = predictor_.step(state, h);
    } catch (const Error& e) {
      throw Error("predict: substep " + std::to_string(m) + ": " + e.what());
    }
    sweep.u[m + 1] = state.u;
    if (problem_->partitioned()) {
      const auto& part = *problem_->partition;
      sweep.f[m + 1] = part.f(problem_->y_block(state.u), problem_->z_block(state.u));
      sweep.g[m + 1] = part.g(problem_->y_block(state.u), problem_->z_block(state.u));
    } else {
      sweep.f[m + 1] = problem_->explicit_rhs(state.u);
      sweep.g[m + 1] = problem_->stiff_rhs(state.u);
    }
    state.work.rhs_evaluations += 1;
    state.work.stiff_evaluations += 1;
  }
  work_ += state.work;
  return sweep;
}

NodeSweep IndcIntegrator::correct(const NodeSweep& prev, const StepState& s, double big_h,
                                  int sweep) {
  if (problem_->partitioned()) return correct_partitioned(prev, s, big_h, sweep);
  return correct_additive(prev, s, big_h, sweep);
}

NodeSweep IndcIntegrator::correct_partitioned(const NodeSweep& prev, const StepState& s,
                                              double big_h, int sweep) {
  const auto& part = *problem_->partition;
  const double eps = part.epsilon;
  const auto& tab = scheme_.base_for_sweep(sweep);
  const auto& ex = tab.explicit_part;
  const auto& im = tab.implicit_part;
  const int ns = tab.stages();
  const int m_nodes = scheme_.num_nodes();
  const double h = big_h / m_nodes;
  const bool gsa = tab.gsa_flag;

  NodeSweep cur;
  cur.u.resize(m_nodes + 1);
  cur.f.resize(m_nodes + 1);
  cur.g.resize(m_nodes + 1);
  cur.u[0] = s.u;

  auto dot_f = [&](const Eigen::RowVectorXd& row) {
    Vector acc = Vector::Zero(part.ny);
    for (int l = 1; l <= m_nodes; ++l)
      if (row(l - 1) != 0.0) acc += row(l - 1) * prev.f[l];
    return acc;
  };
  auto dot_g = [&](const Eigen::RowVectorXd& row) {
    Vector acc = Vector::Zero(part.nz);
    for (int l = 1; l <= m_nodes; ++l)
      if (row(l - 1) != 0.0) acc += row(l - 1) * prev.g[l];
    return acc;
  };
  auto dot_z_prev = [&](const Eigen::RowVectorXd& row) {
    Vector acc = Vector::Zero(part.nz);
    for (int l = 1; l <= m_nodes; ++l) acc += row(l - 1) * problem_->z_block(prev.u[l]).eval();
    return acc;
  };

  // Which delta samples later stages (or the node update) actually consume.
  std::vector<bool> need_df(ns, false), need_dg(ns, false);
  for (int i = 0; i < ns; ++i) {
    for (int j = i + 1; j < ns; ++j) {
      if (ex.a(j, i) != 0.0) need_df[i] = true;
      if (im.a(j, i) != 0.0) need_dg[i] = true;
    }
    if (!gsa && ex.b(i) != 0.0) need_df[i] = true;
    if (!gsa && im.b(i) != 0.0) need_dg[i] = true;
  }

  for (int m = 0; m < m_nodes; ++m) {
    const Vector y_m = problem_->y_block(cur.u[m]);
    const Vector z_m = problem_->z_block(cur.u[m]);
    std::vector<Vector> ys(ns), zs(ns), df(ns), dg(ns);
    for (int i = 0; i < ns; ++i) {
      const auto& rows = scheme_.rows(sweep, m, i);
      Vector y = y_m + big_h * dot_f(rows.s_ex);
      for (int j = 0; j < i; ++j)
        if (ex.a(i, j) != 0.0) y += h * ex.a(i, j) * df[j];
      ys[i] = y;

      if (rows.im_row_zero) {
        zs[i] = z_m;
        if (need_dg[i])
          dg[i] = (m == 0) ? Vector::Zero(part.nz) : (cur.g[m] - dot_g(rows.p_im)).eval();
      } else {
        Vector acc = big_h * dot_g(rows.s_im);
        for (int j = 0; j < i; ++j)
          if (im.a(i, j) != 0.0) acc += h * im.a(i, j) * dg[j];
        const double aii = im.a(i, i);
        const Vector pg = dot_g(rows.p_im);
        if (aii == 0.0) {
          if (eps == 0.0)
            throw UnsupportedStructure("correct: zero-diagonal implicit stage at eps = 0");
          zs[i] = z_m + acc / eps;
        } else {
          auto residual = [&](const Vector& z) -> Vector {
            work_.stiff_evaluations += 1;
            return eps * (z - z_m) - acc - h * aii * (part.g(ys[i], z) - pg);
          };
          auto jacobian = [&](const Vector& z) -> Eigen::MatrixXd {
            return eps * Eigen::MatrixXd::Identity(part.nz, part.nz) -
                   h * aii * predictor_.gz_or_fd(ys[i], z, work_);
          };
          const Vector guess = dot_z_prev(rows.p_im);
          NewtonResult res;
          try {
            res = newton_solve(residual, jacobian, guess, opts_.newton);
          } catch (const Error& e) {
            throw Error("correct: sweep " + std::to_string(sweep) + " substep " +
                        std::to_string(m) + " stage " + std::to_string(i) + ": " + e.what());
          }
          work_.newton_iterations += res.iterations;
          zs[i] = res.x;
        }
        if (need_dg[i]) {
          dg[i] = part.g(ys[i], zs[i]) - pg;
          work_.stiff_evaluations += 1;
        }
      }

      if (need_df[i]) {
        if (rows.ex_at_left_node) {
          df[i] = (m == 0) ? Vector::Zero(part.ny) : (cur.f[m] - dot_f(rows.p_ex)).eval();
        } else {
          df[i] = part.f(ys[i], zs[i]) - dot_f(rows.p_ex);
          work_.rhs_evaluations += 1;
        }
      }
    }

    Vector u_next(problem_->dim);
    if (gsa) {
      u_next << ys[ns - 1], zs[ns - 1];
    } else {
      if (eps == 0.0) throw RequiresGsa("correct: non-GSA base at eps = 0");
      Vector y = y_m + big_h * dot_f(scheme_.quadrature().s_sub().row(m));
      Vector zacc = big_h * dot_g(scheme_.quadrature().s_sub().row(m));
      for (int i = 0; i < ns; ++i) {
        if (ex.b(i) != 0.0) y += h * ex.b(i) * df[i];
        if (im.b(i) != 0.0) zacc += h * im.b(i) * dg[i];
      }
      u_next << y, (z_m + zacc / eps);
    }
    cur.u[m + 1] = u_next;
    cur.f[m + 1] = part.f(problem_->y_block(u_next), problem_->z_block(u_next));
    cur.g[m + 1] = part.g(problem_->y_block(u_next), problem_->z_block(u_next));
    work_.rhs_evaluations += 1;
    work_.stiff_evaluations += 1;
  }
  return cur;
}

NodeSweep IndcIntegrator::correct_additive(const NodeSweep& prev, const StepState& s, double big_h,
                                           int sweep) {
  const auto& tab = scheme_.base_for_sweep(sweep);
  const auto& ex = tab.explicit_part;
  const auto& im = tab.implicit_part;
  const int ns = tab.stages();
  const int m_nodes = scheme_.num_nodes();
  const double h = big_h / m_nodes;
  const bool gsa = tab.gsa_flag;
  const int n = problem_->dim;

  NodeSweep cur;
  cur.u.resize(m_nodes + 1);
  cur.f.resize(m_nodes + 1);
  cur.g.resize(m_nodes + 1);
  cur.u[0] = s.u;

  auto dot_over = [&](const Eigen::RowVectorXd& row, const std::vector<Vector>& samples) {
    Vector acc = Vector::Zero(n);
    for (int l = 1; l <= m_nodes; ++l)
      if (row(l - 1) != 0.0) acc += row(l - 1) * samples[l];
    return acc;
  };

  std::vector<bool> need_df(ns, false), need_dg(ns, false);
  for (int i = 0; i < ns; ++i) {
    for (int j = i + 1; j < ns; ++j) {
      if (ex.a(j, i) != 0.0) need_df[i] = true;
      if (im.a(j, i) != 0.0) need_dg[i] = true;
    }
    if (!gsa && ex.b(i) != 0.0) need_df[i] = true;
    if (!gsa && im.b(i) != 0.0) need_dg[i] = true;
  }

  AdditiveStageSolver solver(problem_, opts_.newton);
  for (int m = 0; m < m_nodes; ++m) {
    const Vector& u_m = cur.u[m];
    std::vector<Vector> st(ns), df(ns), dg(ns);
    for (int i = 0; i < ns; ++i) {
      const auto& rows = scheme_.rows(sweep, m, i);
      Vector base_val = u_m + big_h * dot_over(rows.s_ex, prev.f) +
                        big_h * dot_over(rows.s_im, prev.g);
      for (int j = 0; j < i; ++j) {
        if (ex.a(i, j) != 0.0) base_val += h * ex.a(i, j) * df[j];
        if (im.a(i, j) != 0.0) base_val += h * im.a(i, j) * dg[j];
      }
      const double aii = im.a(i, i);
      Vector pg;
      if (aii != 0.0 || need_dg[i]) pg = dot_over(rows.p_im, prev.g);
      if (aii == 0.0) {
        st[i] = base_val;
      } else {
        const Vector known = base_val - h * aii * pg;
        const Vector guess = dot_over(rows.p_im, prev.u);  // interpolated previous iterate
        try {
          st[i] = solver.solve(known, h * aii, guess, work_);
        } catch (const Error& e) {
          throw Error("correct: sweep " + std::to_string(sweep) + " substep " + std::to_string(m) +
                      " stage " + std::to_string(i) + ": " + e.what());
        }
      }
      if (need_dg[i]) {
        if (rows.im_row_zero) {
          dg[i] = (m == 0) ? Vector::Zero(n) : (cur.g[m] - dot_over(rows.p_im, prev.g)).eval();
        } else {
          dg[i] = problem_->stiff_rhs(st[i]) - pg;
          work_.stiff_evaluations += 1;
        }
      }
      if (need_df[i]) {
        if (rows.ex_at_left_node) {
          df[i] = (m == 0) ? Vector::Zero(n) : (cur.f[m] - dot_over(rows.p_ex, prev.f)).eval();
        } else {
          df[i] = problem_->explicit_rhs(st[i]) - dot_over(rows.p_ex, prev.f);
          work_.rhs_evaluations += 1;
        }
      }
    }

    Vector u_next;
    if (gsa) {
      u_next = st[ns - 1];
    } else {
      u_next = u_m + big_h * dot_over(scheme_.quadrature().s_sub().row(m), prev.f) +
               big_h * dot_over(scheme_.quadrature().s_sub().row(m), prev.g);
      for (int i = 0; i < ns; ++i) {
        if (ex.b(i) != 0.0) u_next += h * ex.b(i) * df[i];
        if (im.b(i) != 0.0) u_next += h * im.b(i) * dg[i];
      }
    }
    cur.u[m + 1] = u_next;
    cur.f[m + 1] = problem_->explicit_rhs(u_next);
    cur.g[m + 1] = problem_->stiff_rhs(u_next);
    work_.rhs_evaluations += 1;
    work_.stiff_evaluations += 1;
  }
  return cur;
}

StepState IndcIntegrator::step(const StepState& s, double big_h) {
  if (problem_->partitioned() && problem_->partition->epsilon == 0.0) {
    for (int k = 0; k <= scheme_.corrections(); ++k)
      if (!scheme_.base_for_sweep(k).gsa_flag)
        throw RequiresGsa("indc_step: eps = 0 requires GSA bases in every sweep");
  }
  work_ = s.work;
  NodeSweep sweep = predict(s, big_h);
  for (int k = 1; k <= scheme_.corrections(); ++k) sweep = correct(sweep, s, big_h, k);
  StepState out;
  out.t = s.t + big_h;
  out.u = sweep.u[scheme_.num_nodes()];
  out.work = work_;
  return out;
}

StepState IndcIntegrator::integrate(StepState s, double t1, double big_h,
                                    const std::function<void(const StepState&)>& on_step) {
  const double span = t1 - s.t;
  if (span == 0.0) return s;
  const double ratio = span / big_h;
  const long long n = std::llround(ratio);
  if (n <= 0 || std::abs(ratio - static_cast<double>(n)) > 1e-8 * std::max(1.0, std::abs(ratio)))
    throw OutOfRange("integrate: (t1 - t0)/H is not an integer");
  for (long long i = 0; i < n; ++i) {
    try {
      s = step(s, big_h);
    } catch (const Error& e) {
      throw Error("integrate: step " + std::to_string(i) + ": " + e.what());
    }
    if (on_step) on_step(s);
  }
  s.t = t1;
  return s;
}

}  // namespace indc
