#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "indc/assembly.hpp"
#include "indc/presets.hpp"
#include "indc/study.hpp"

namespace {

int do_run(const std::string& problem, double eps, const std::string& scheme, int nodes,
           int corrections, double dt, double t_final, double param) {
  indc::StudySpec spec;
  spec.problem = problem;
  spec.problem_param = param;
  spec.scheme = {scheme, nodes, corrections};
  spec.t_final = t_final;
  spec.dts = {dt};
  spec.epsilons = {eps};
  spec.reference =
      problem == "burgers" ? indc::ReferenceMode::SelfConvergence : indc::ReferenceMode::Exact;
  if (problem == "linrelax" || problem == "nlrelax" || problem == "burgers") {
    spec.norm = indc::NormKind::L1;
    spec.norm_component = 0;
  }
  const indc::ConvergenceReport report = indc::run_study(spec);
  const auto& cell = report.cells.front();
  if (!cell.failure.empty()) {
    std::cerr << "run failed: " << cell.failure << "\n";
    return 2;
  }
  std::printf("scheme        %s\n", report.scheme_label.c_str());
  std::printf("problem       %s (eps = %g)\n", problem.c_str(), eps);
  std::printf("dt            %.10g   t_final %.10g\n", dt, t_final);
  if (cell.error) std::printf("error         %.6e\n", *cell.error);
  for (size_t b = 0; b < cell.component_errors.size(); ++b)
    std::printf("  component %zu error %.6e\n", b, cell.component_errors[b]);
  std::printf("newton_iters  %ld\n", cell.work.newton_iterations);
  std::printf("rhs_evals     %ld\n",
              cell.work.rhs_evaluations + cell.work.stiff_evaluations);
  return 0;
}

int do_study(const std::string& preset_name, bool full, const std::string& out_path,
             const std::string& format) {
  const indc::Preset preset = indc::get_preset(preset_name, full);
  std::string text;
  bool any_failed = false;
  bool first = true;
  for (const auto& spec : preset.studies) {
    const indc::ConvergenceReport report = indc::run_study(spec);
    any_failed = any_failed || report.has_failures();
    if (format == "json") {
      text += indc::emit_report(report, indc::ReportFormat::Json);
    } else {
      std::string csv = indc::emit_report(report, indc::ReportFormat::Csv);
      if (!first) csv.erase(0, csv.find('\n') + 1);  // keep a single header
      text += csv;
    }
    first = false;
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream os(out_path);
    os << text;
    std::cerr << "wrote " << out_path << "\n";
  }
  return any_failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IMEX Runge-Kutta / integral deferred correction experiment driver"};
  app.require_subcommand(1);

  // run
  std::string problem = "vdp", scheme = "imex1-ars";
  double eps = 1e-6, dt = 1e-3, t_final = 0.5, param = 0.0;
  int nodes = 1, corrections = 0;
  auto* run = app.add_subcommand("run", "integrate one problem once and report the error");
  run->add_option("--problem", problem, "vdp | burgers | linrelax | nlrelax");
  run->add_option("--eps", eps, "stiffness parameter");
  run->add_option("--scheme", scheme, "base IMEX scheme name");
  run->add_option("--nodes", nodes, "InDC quadrature nodes M");
  run->add_option("--corrections", corrections, "InDC correction sweeps K");
  run->add_option("--dt", dt, "time step H");
  run->add_option("--tfinal", t_final, "final time");
  run->add_option("--param", param, "problem parameter (R for burgers, b for linrelax)");

  // study
  std::string preset_name = "fig1", out_path, study_format = "csv";
  bool full = false;
  auto* study = app.add_subcommand("study", "run a bundled convergence study preset");
  study->add_option("--preset", preset_name, "fig1 fig2 fig5 fig6 table2 table3")->required();
  study->add_flag("--full", full, "paper-resolution grids (slow)");
  study->add_option("--out", out_path, "output file (default stdout)");
  study->add_option("--format", study_format, "csv | json");

  // tableau
  auto* tableau = app.add_subcommand("tableau", "inspect catalog and assembled tableaus");
  tableau->require_subcommand(1);
  std::string base_name = "imex1-ars", tab_format = "rational";
  int asm_nodes = 2, asm_corr = 1;
  auto* assemble_cmd = tableau->add_subcommand("assemble", "assembled InDC double tableau");
  assemble_cmd->add_option("--base", base_name, "base scheme name")->required();
  assemble_cmd->add_option("--nodes", asm_nodes, "quadrature nodes M")->required();
  assemble_cmd->add_option("--corrections", asm_corr, "correction sweeps K")->required();
  assemble_cmd->add_option("--format", tab_format, "rational | decimal");
  std::string show_name = "imex1-ars";
  auto* show_cmd = tableau->add_subcommand("show", "print a catalog tableau");
  show_cmd->add_option("--name", show_name, "scheme name")->required();

  // quadrature debug
  int quad_nodes = 2;
  auto* quad_cmd = app.add_subcommand("quadrature", "print S_sub / S_cum as exact rationals");
  quad_cmd->add_option("--nodes", quad_nodes, "node count M")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return do_run(problem, eps, scheme, nodes, corrections, dt, t_final, param);
    if (*study) return do_study(preset_name, full, out_path, study_format);
    if (*tableau) {
      if (*assemble_cmd) {
        const auto a = indc::assemble(indc::find_scheme(base_name), asm_nodes, asm_corr);
        const auto fmt = tab_format == "decimal" ? indc::TableauFormat::Decimal
                                                 : indc::TableauFormat::Rational;
        std::cout << indc::emit(a, fmt);
        const auto rep = indc::analyze(a);
        std::cerr << "stages " << a.tableau.stages() << "  gsa " << (rep.gsa ? "yes" : "no")
                  << "  type " << indc::to_string(rep.type) << "  implicit invertible "
                  << (rep.implicit_invertible ? "yes" : "no") << "  det identity "
                  << (rep.det_identity_holds ? "yes" : "no") << "\n";
        return 0;
      }
      if (*show_cmd) {
        std::cout << indc::emit_tableau(indc::find_scheme(show_name),
                                        indc::TableauFormat::Rational);
        return 0;
      }
    }
    if (*quad_cmd) {
      const auto q = indc::build_quadrature(quad_nodes);
      std::cout << "nodes";
      for (const auto& n : q.nodes()) std::cout << ' ' << indc::format_rational(n);
      std::cout << "\nS_sub\n";
      for (const auto& row : q.s_sub_exact()) {
        for (size_t l = 0; l < row.size(); ++l)
          std::cout << (l ? " " : "") << indc::format_rational(row[l]);
        std::cout << "\n";
      }
      std::cout << "S_cum\n";
      for (const auto& row : q.s_cum_exact()) {
        for (size_t l = 0; l < row.size(); ++l)
          std::cout << (l ? " " : "") << indc::format_rational(row[l]);
        std::cout << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
