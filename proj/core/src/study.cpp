#include "indc/study.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "indc/errors.hpp"

namespace indc {

namespace {

struct Instance {
  TestProblem tp;
  int num_blocks = 1;
  int block_size = 1;
  double dx = 1.0;  // 1 for ODE problems (plain vector norms)
};

Instance make_instance(const StudySpec& spec, double eps, double dt) {
  Instance inst;
  if (spec.problem == "vdp") {
    inst.tp = van_der_pol_problem(eps);
    inst.num_blocks = 2;
    inst.block_size = 1;
  } else if (spec.problem == "burgers") {
    const double r = spec.problem_param > 0.0 ? spec.problem_param : 0.1;
    const long n = std::llround(1.0 / dt);
    if (std::abs(1.0 / dt - static_cast<double>(n)) > 1e-8)
      throw OutOfRange("burgers study: dt must be 1/N for an integer grid size");
    const Grid1D grid = make_grid(static_cast<int>(n), 0.0, 1.0);
    inst.tp = burgers_problem(grid, r);
    inst.num_blocks = 1;
    inst.block_size = grid.n;
    inst.dx = grid.dx();
  } else if (spec.problem == "linrelax") {
    const double b = spec.problem_param != 0.0 ? spec.problem_param : 0.5;
    const int n = spec.grid_n > 0 ? spec.grid_n : 100;  // dx = 0.02 on [0,2]
    const Grid1D grid = make_grid(n, 0.0, 2.0);
    inst.tp = linear_relaxation_problem(grid, b, eps);
    inst.num_blocks = 2;
    inst.block_size = grid.n;
    inst.dx = grid.dx();
  } else if (spec.problem == "nlrelax") {
    const int n = spec.grid_n > 0 ? spec.grid_n : 100;  // dx = 0.01 on [0,1]
    const Grid1D grid = make_grid(n, 0.0, 1.0);
    inst.tp = nonlinear_relaxation_problem(grid, eps);
    inst.num_blocks = 2;
    inst.block_size = grid.n;
    inst.dx = grid.dx();
  } else {
    throw OutOfRange("run_study: unknown problem '" + spec.problem + "'");
  }
  return inst;
}

Vector select_block(const Vector& v, int component, int block_size) {
  if (component < 0) return v;
  return v.segment(component * block_size, block_size);
}

double norm_of(const Vector& diff, NormKind norm, double dx) {
  switch (norm) {
    case NormKind::LInf: return diff.lpNorm<Eigen::Infinity>();
    case NormKind::L1: return dx * diff.lpNorm<1>();
    case NormKind::L2: return std::sqrt(dx * diff.squaredNorm());
  }
  return diff.lpNorm<Eigen::Infinity>();
}

/// Restrict a state on a fine grid onto a coarser one (factor must divide),
/// blockwise.
Vector restrict_state(const Vector& fine, int num_blocks, int n_fine, int n_coarse) {
  if (n_fine == n_coarse) return fine;
  const int ratio = n_fine / n_coarse;
  Vector out(num_blocks * n_coarse);
  for (int b = 0; b < num_blocks; ++b)
    for (int j = 0; j < n_coarse; ++j) out(b * n_coarse + j) = fine(b * n_fine + j * ratio);
  return out;
}

struct RunOut {
  Vector u;
  WorkCounters work;
  std::string failure;
  int block_size = 1;
  double dx = 1.0;
};

int worker_count(size_t tasks) {
  int n = 0;
  if (const char* env = std::getenv("INDC_IMEX_WORKERS")) n = std::atoi(env);
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  return static_cast<int>(std::min<size_t>(n, std::max<size_t>(tasks, 1)));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double linfit_slope(const std::vector<double>& logx, const std::vector<double>& logy) {
  const size_t n = logx.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += logx[i];
    sy += logy[i];
    sxx += logx[i] * logx[i];
    sxy += logx[i] * logy[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

bool ConvergenceReport::has_failures() const {
  for (const auto& c : cells)
    if (!c.failure.empty()) return true;
  return false;
}

const CellResult& ConvergenceReport::cell(double eps, double dt) const {
  for (const auto& c : cells)
    if (c.eps == eps && c.dt == dt) return c;
  throw OutOfRange("ConvergenceReport: no such cell");
}

std::optional<double> observed_order(double e_coarse, double e_fine) {
  if (e_coarse <= 1e-15 || e_fine <= 1e-15) return std::nullopt;
  return std::log2(e_coarse / e_fine);
}

ConvergenceReport run_study(const StudySpec& spec) {
  if (spec.dts.empty() || spec.epsilons.empty())
    throw InsufficientData("run_study: empty dt or eps list");
  for (size_t i = 1; i < spec.dts.size(); ++i)
    if (!(spec.dts[i] < spec.dts[i - 1]))
      throw OutOfRange("run_study: dt ladder must be strictly decreasing");
  if (spec.problem == "burgers" && spec.reference == ReferenceMode::Exact)
    throw OutOfRange("run_study: the Burgers problem has a self-convergence reference only");

  const int neps = static_cast<int>(spec.epsilons.size());
  const int ndts = static_cast<int>(spec.dts.size());

  ConvergenceReport report;
  report.spec = spec;
  {
    IndcScheme sch(find_scheme(spec.scheme.base_name), spec.scheme.num_nodes,
                   spec.scheme.corrections);
    report.scheme_label = sch.label();
  }

  std::vector<std::vector<RunOut>> runs(neps, std::vector<RunOut>(ndts));
  std::vector<Vector> refs(neps);
  std::vector<std::string> ref_failures(neps);
  const bool need_reference = spec.reference == ReferenceMode::Exact;

  struct Task {
    int eps_idx;
    int dt_idx;  // -1: reference solve
  };
  std::vector<Task> tasks;
  for (int e = 0; e < neps; ++e) {
    if (need_reference) tasks.push_back({e, -1});
    for (int d = 0; d < ndts; ++d) tasks.push_back({e, d});
  }

  auto execute = [&](const Task& task) {
    const double eps = spec.epsilons[task.eps_idx];
    if (task.dt_idx >= 0) {
      const double dt = spec.dts[task.dt_idx];
      RunOut& out = runs[task.eps_idx][task.dt_idx];
      try {
        Instance inst = make_instance(spec, eps, dt);
        out.block_size = inst.block_size;
        out.dx = inst.dx;
        IndcScheme sch(find_scheme(spec.scheme.base_name), spec.scheme.num_nodes,
                       spec.scheme.corrections);
        IndcIntegrator integrator(std::move(sch), &inst.tp.problem);
        StepState s{0.0, inst.tp.initial, {}};
        if (spec.t_final > 0.0) s = integrator.integrate(s, spec.t_final, dt);
        out.u = s.u;
        out.work = s.work;
      } catch (const std::exception& e) {
        out.failure = e.what();
      }
      return;
    }
    // reference solve for this eps
    try {
      Instance inst = make_instance(spec, eps, spec.dts.front());
      if (inst.tp.problem.reference_solution) {
        refs[task.eps_idx] = inst.tp.problem.reference_solution(spec.t_final);
        return;
      }
      // no closed form: high-order fine InDC solve (order 8)
      const long steps = (eps == 0.0) ? 2048 : 8192;
      IndcScheme sch(find_scheme("IMEX2-ARS"), 8, 3);
      IndcIntegrator integrator(std::move(sch), &inst.tp.problem);
      StepState s{0.0, inst.tp.initial, {}};
      if (spec.t_final > 0.0)
        s = integrator.integrate(s, spec.t_final, spec.t_final / static_cast<double>(steps));
      refs[task.eps_idx] = s.u;
    } catch (const std::exception& e) {
      ref_failures[task.eps_idx] = e.what();
    }
  };

  {
    std::atomic<size_t> next{0};
    const int nworkers = worker_count(tasks.size());
    auto worker = [&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        execute(tasks[i]);
      }
    };
    if (nworkers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(nworkers);
      for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
  }

  // Deterministic merge: eps outer, dt inner (both in the given, descending order).
  for (int e = 0; e < neps; ++e) {
    std::optional<double> prev_error;
    for (int d = 0; d < ndts; ++d) {
      const RunOut& run = runs[e][d];
      CellResult cell;
      cell.eps = spec.epsilons[e];
      cell.dt = spec.dts[d];
      cell.work = run.work;
      if (!run.failure.empty()) {
        cell.failure = run.failure;
      } else if (need_reference) {
        if (!ref_failures[e].empty()) {
          cell.failure = "reference: " + ref_failures[e];
        } else {
          const Vector diff = run.u - refs[e];
          cell.error =
              norm_of(select_block(diff, spec.norm_component, run.block_size), spec.norm, run.dx);
          for (int b = 0; b < static_cast<int>(diff.size()) / run.block_size; ++b)
            cell.component_errors.push_back(
                norm_of(diff.segment(b * run.block_size, run.block_size), spec.norm, run.dx));
        }
      } else if (d >= 1 && runs[e][d - 1].failure.empty()) {
        // self-convergence difference against the next-coarser run
        const RunOut& coarse = runs[e][d - 1];
        const Vector fine_on_coarse = restrict_state(
            run.u, static_cast<int>(run.u.size()) / run.block_size, run.block_size,
            coarse.block_size);
        const Vector diff = fine_on_coarse - coarse.u;
        cell.error =
            norm_of(select_block(diff, spec.norm_component, coarse.block_size), spec.norm,
                    coarse.dx);
        for (int b = 0; b < static_cast<int>(diff.size()) / coarse.block_size; ++b)
          cell.component_errors.push_back(
              norm_of(diff.segment(b * coarse.block_size, coarse.block_size), spec.norm,
                      coarse.dx));
      }
      if (cell.error && prev_error) cell.order = observed_order(*prev_error, *cell.error);
      prev_error = cell.error;
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

UniformOrderResult uniform_order_analysis(const ConvergenceReport& report, int order_r) {
  const auto& spec = report.spec;
  std::vector<double> dts, max_errs, eps_stars;
  for (double dt : spec.dts) {
    double best = -1.0, best_eps = 0.0;
    for (const auto& c : report.cells) {
      if (c.dt != dt || !c.error) continue;
      if (*c.error > best) {
        best = *c.error;
        best_eps = c.eps;
      }
    }
    if (best >= 1e-13) {  // noise-floor cells are excluded from the fit
      dts.push_back(dt);
      max_errs.push_back(best);
      eps_stars.push_back(best_eps);
    }
  }
  if (dts.size() < 4 || spec.epsilons.size() < 8)
    throw InsufficientData("uniform_order_analysis: need >= 4 dt values and a dense eps sweep");

  UniformOrderResult res;
  res.dts = dts;
  res.max_errors = max_errs;
  res.eps_stars = eps_stars;
  std::vector<double> lx, ly, lz;
  for (size_t i = 0; i < dts.size(); ++i) {
    lx.push_back(std::log(dts[i]));
    ly.push_back(std::log(max_errs[i]));
    lz.push_back(std::log(eps_stars[i]));
  }
  res.slope_max_err = linfit_slope(lx, ly);
  res.slope_eps_star = linfit_slope(lx, lz);
  res.theory_max_err = 2.0 * order_r / (order_r + 1.0);
  res.theory_eps_star = (order_r - 1.0) / (order_r + 1.0);
  return res;
}

UniformOrderResult uniform_order_synthetic(int order_r, const std::vector<double>& dts,
                                           const std::vector<double>& epsilons) {
  UniformOrderResult res;
  std::vector<double> lx, ly, lz;
  for (double h : dts) {
    double best = -1.0, best_eps = 0.0;
    for (double eps : epsilons) {
      const double taylor = std::pow(h / eps, order_r);
      const double asymptotic = std::pow(h, order_r) + eps * h;
      const double err = std::min(taylor, asymptotic);
      if (err > best) {
        best = err;
        best_eps = eps;
      }
    }
    res.dts.push_back(h);
    res.max_errors.push_back(best);
    res.eps_stars.push_back(best_eps);
    lx.push_back(std::log(h));
    ly.push_back(std::log(best));
    lz.push_back(std::log(best_eps));
  }
  res.slope_max_err = linfit_slope(lx, ly);
  res.slope_eps_star = linfit_slope(lx, lz);
  res.theory_max_err = 2.0 * order_r / (order_r + 1.0);
  res.theory_eps_star = (order_r - 1.0) / (order_r + 1.0);
  return res;
}

namespace {

const char* norm_name(NormKind n) {
  switch (n) {
    case NormKind::LInf: return "linf";
    case NormKind::L1: return "l1";
    case NormKind::L2: return "l2";
  }
  return "linf";
}

NormKind norm_from(const std::string& s) {
  if (s == "l1") return NormKind::L1;
  if (s == "l2") return NormKind::L2;
  return NormKind::LInf;
}

}  // namespace

std::string emit_report(const ConvergenceReport& report, ReportFormat format) {
  const auto& spec = report.spec;
  if (format == ReportFormat::Csv) {
    std::ostringstream os;
    os << "problem,scheme,base,M,K,eps,dt,error,order,newton_iters,rhs_evals\n";
    for (const auto& c : report.cells) {
      os << spec.problem << ',' << report.scheme_label << ',' << spec.scheme.base_name << ','
         << spec.scheme.num_nodes << ',' << spec.scheme.corrections << ','
         << format_double(c.eps) << ',' << format_double(c.dt) << ','
         << (c.error ? format_double(*c.error) : "") << ','
         << (c.order ? format_double(*c.order) : "") << ',' << c.work.newton_iterations << ','
         << (c.work.rhs_evaluations + c.work.stiff_evaluations) << "\n";
    }
    return os.str();
  }

  nlohmann::json j;
  j["metadata"] = {
      {"library", "indc-imex"},
      {"version", "0.1.0"},
      {"spec",
       {{"problem", spec.problem},
        {"problem_param", spec.problem_param},
        {"grid_n", spec.grid_n},
        {"base", spec.scheme.base_name},
        {"num_nodes", spec.scheme.num_nodes},
        {"corrections", spec.scheme.corrections},
        {"dts", spec.dts},
        {"epsilons", spec.epsilons},
        {"t_final", spec.t_final},
        {"norm", norm_name(spec.norm)},
        {"norm_component", spec.norm_component},
        {"reference", spec.reference == ReferenceMode::Exact ? "exact" : "self-convergence"}}},
      {"scheme_label", report.scheme_label}};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json row;
    row["eps"] = c.eps;
    row["dt"] = c.dt;
    if (c.error)
      row["error"] = *c.error;
    else
      row["error"] = nullptr;
    if (c.order)
      row["order"] = *c.order;
    else
      row["order"] = nullptr;
    row["newton_iters"] = c.work.newton_iterations;
    row["rhs_evals"] = c.work.rhs_evaluations + c.work.stiff_evaluations;
    row["failure"] = c.failure;
    row["component_errors"] = c.component_errors;
    rows.push_back(row);
  }
  j["cells"] = rows;
  return j.dump(2) + "\n";
}

ConvergenceReport parse_report_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ConvergenceReport report;
  const auto& meta = j.at("metadata");
  const auto& spec = meta.at("spec");
  report.spec.problem = spec.at("problem").get<std::string>();
  report.spec.problem_param = spec.at("problem_param").get<double>();
  report.spec.grid_n = spec.at("grid_n").get<int>();
  report.spec.scheme.base_name = spec.at("base").get<std::string>();
  report.spec.scheme.num_nodes = spec.at("num_nodes").get<int>();
  report.spec.scheme.corrections = spec.at("corrections").get<int>();
  report.spec.dts = spec.at("dts").get<std::vector<double>>();
  report.spec.epsilons = spec.at("epsilons").get<std::vector<double>>();
  report.spec.t_final = spec.at("t_final").get<double>();
  report.spec.norm = norm_from(spec.at("norm").get<std::string>());
  report.spec.norm_component = spec.at("norm_component").get<int>();
  report.spec.reference = spec.at("reference").get<std::string>() == "exact"
                              ? ReferenceMode::Exact
                              : ReferenceMode::SelfConvergence;
  report.scheme_label = meta.at("scheme_label").get<std::string>();
  size_t idx = 0;
  for (const auto& row : j.at("cells")) {
    CellResult c;
    c.eps = row.at("eps").get<double>();
    c.dt = row.at("dt").get<double>();
    if (!row.at("error").is_null()) c.error = row.at("error").get<double>();
    if (!row.at("order").is_null()) c.order = row.at("order").get<double>();
    c.work.newton_iterations = row.at("newton_iters").get<long>();
    c.work.rhs_evaluations = row.at("rhs_evals").get<long>();
    c.failure = row.at("failure").get<std::string>();
    c.component_errors = row.at("component_errors").get<std::vector<double>>();
    report.cells.push_back(std::move(c));
    ++idx;
  }
  return report;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out;
  if (count <= 1) {
    out.push_back(lo);
    return out;
  }
  const double llo = std::log10(lo), lhi = std::log10(hi);
  for (int i = 0; i < count; ++i)
    out.push_back(std::pow(10.0, llo + (lhi - llo) * i / (count - 1)));
  return out;
}

std::vector<double> dyadic_ladder(double dt0, int count) {
  std::vector<double> out;
  double dt = dt0;
  for (int i = 0; i < count; ++i) {
    out.push_back(dt);
    dt *= 0.5;
  }
  return out;
}

}  // namespace indc
