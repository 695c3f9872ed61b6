#ifndef INDC_STUDY_HPP
#define INDC_STUDY_HPP

#include <optional>
#include <string>
#include <vector>

#include "indc/indc.hpp"
#include "indc/problems.hpp"

namespace indc {

enum class NormKind { LInf, L1, L2 };
enum class ReferenceMode { Exact, SelfConvergence };

struct SchemeSpec {
  std::string base_name = "IMEX1-GSA-ARS";
  int num_nodes = 1;
  int corrections = 0;
};

/// One convergence study: a problem, one InDC scheme, a dyadic dt ladder and
/// an eps sweep. Problems: "vdp" (partitioned, eps from the sweep),
/// "burgers" (problem_param = R, grid tied to dt), "linrelax"
/// (problem_param = b, fixed grid), "nlrelax" (fixed grid).
struct StudySpec {
  std::string problem = "vdp";
  double problem_param = 0.0;
  int grid_n = 0;  // 0: problem default; burgers ignores it (N = 1/dt)
  SchemeSpec scheme;
  std::vector<double> dts;       // strictly decreasing, dyadic
  std::vector<double> epsilons;  // outer sweep
  double t_final = 0.5;
  NormKind norm = NormKind::LInf;
  int norm_component = -1;  // -1: all state entries; else a problem block (u-block = 0, ...)
  ReferenceMode reference = ReferenceMode::Exact;
};

struct CellResult {
  double eps = 0.0;
  double dt = 0.0;
  std::optional<double> error;
  std::optional<double> order;  // vs the next-coarser dt at the same eps
  WorkCounters work;
  std::string failure;                  // nonempty when the cell failed
  std::vector<double> component_errors;  // per-block errors (ODE problems)
};

struct ConvergenceReport {
  StudySpec spec;
  std::string scheme_label;
  std::vector<CellResult> cells;  // eps outer (descending), dt inner (descending)

  bool has_failures() const;
  const CellResult& cell(double eps, double dt) const;
};

/// Integrates every (dt, eps) cell (independent cells run on a worker pool
/// sized by INDC_IMEX_WORKERS, default hardware parallelism) and computes
/// errors against the exact/reference solution or by self-convergence
/// differences. Per-cell failures are recorded, not fatal.
ConvergenceReport run_study(const StudySpec& spec);

/// log2(e_h / e_{h/2}); absent when either error is at the 1e-15 noise floor.
std::optional<double> observed_order(double e_coarse, double e_fine);

struct UniformOrderResult {
  double slope_max_err = 0.0;
  double slope_eps_star = 0.0;
  double theory_max_err = 0.0;   // 2r/(r+1)
  double theory_eps_star = 0.0;  // (r-1)/(r+1)
  std::vector<double> dts, max_errors, eps_stars;
};

/// Worst-case-over-eps analysis: for each dt the maximal error and its
/// argmax eps*, with log-log least-squares slopes against dt. Requires at
/// least 4 dt values and 8 eps values.
UniformOrderResult uniform_order_analysis(const ConvergenceReport& report, int order_r);

/// Closed-form error surface min((h/eps)^r, h^r + eps h) evaluated on a grid;
/// the oracle for the uniform-order exponents.
UniformOrderResult uniform_order_synthetic(int order_r, const std::vector<double>& dts,
                                           const std::vector<double>& epsilons);

enum class ReportFormat { Csv, Json };

/// CSV columns: problem, scheme, base, M, K, eps, dt, error, order,
/// newton_iters, rhs_evals. Deterministic row order (eps outer, dt inner,
/// both descending). JSON mirrors the rows with a metadata header.
std::string emit_report(const ConvergenceReport& report, ReportFormat format);

/// Inverse of the JSON emission (round-trip identity).
ConvergenceReport parse_report_json(const std::string& text);

/// Log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int count);

/// Dyadic ladder dt0, dt0/2, ..., length count.
std::vector<double> dyadic_ladder(double dt0, int count);

}  // namespace indc

#endif
