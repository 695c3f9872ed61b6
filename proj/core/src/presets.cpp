#include "indc/presets.hpp"

#include "indc/errors.hpp"

namespace indc {

namespace {

StudySpec vdp_study(const std::string& base, int m, int k, int rungs) {
  StudySpec s;
  s.problem = "vdp";
  s.scheme = {base, m, k};
  s.t_final = 0.5;
  s.dts = dyadic_ladder(0.5 / 16.0, rungs);
  s.epsilons = {1e-6};
  s.norm = NormKind::LInf;
  s.reference = ReferenceMode::Exact;
  return s;
}

StudySpec linrelax_study(const std::string& base, int m, int k, int neps) {
  StudySpec s;
  s.problem = "linrelax";
  s.problem_param = 0.5;
  s.scheme = {base, m, k};
  s.t_final = 0.2;
  s.dts = {0.2 / 16.0, 0.2 / 32.0};
  s.epsilons = log_spaced(1e-8, 1.0, neps);
  s.norm = NormKind::L1;
  s.norm_component = 0;
  s.reference = ReferenceMode::Exact;
  return s;
}

StudySpec nlrelax_study(const std::string& base, int m, int k, int neps, int rungs) {
  StudySpec s;
  s.problem = "nlrelax";
  s.scheme = {base, m, k};
  s.t_final = 0.1;
  s.dts = dyadic_ladder(0.1 / 16.0, rungs);
  s.epsilons = log_spaced(1e-8, 1.0, neps);
  s.norm = NormKind::L1;
  s.norm_component = 0;
  s.reference = ReferenceMode::SelfConvergence;
  return s;
}

StudySpec burgers_study(const std::string& base, int m, int k, double dt0, int rungs) {
  StudySpec s;
  s.problem = "burgers";
  s.problem_param = 0.1;
  s.scheme = {base, m, k};
  s.t_final = 1.0 / 48.0;
  s.dts = dyadic_ladder(dt0, rungs);
  s.epsilons = {1.0};  // the diffusion problem carries no eps sweep
  s.norm = NormKind::L1;
  s.norm_component = 0;
  s.reference = ReferenceMode::SelfConvergence;
  return s;
}

}  // namespace

Preset get_preset(const std::string& name, bool full) {
  Preset p;
  p.name = name;
  if (name == "fig1") {
    const int rungs = full ? 8 : 6;
    p.studies.push_back(vdp_study("IMEX1-NGSA-A", 5, 3, rungs));
    p.studies.push_back(vdp_study("IMEX1-GSA-ARS", 7, 3, rungs));
    p.studies.push_back(vdp_study("IMEX1-GSA-A", 7, 3, rungs));
  } else if (name == "fig2") {
    const int rungs = full ? 8 : 6;
    p.studies.push_back(vdp_study("IMEX2-ARS", 5, 1, rungs));
    p.studies.push_back(vdp_study("IMEX2-ARS", 7, 2, rungs));
    p.studies.push_back(vdp_study("IMEX2-CK", 5, 1, rungs));
    p.studies.push_back(vdp_study("IMEX3-ARS", 7, 1, rungs));
  } else if (name == "fig5") {
    const int neps = full ? 25 : 13;
    p.studies.push_back(linrelax_study("IMEX1-GSA-ARS", 2, 1, neps));
    p.studies.push_back(linrelax_study("IMEX1-GSA-ARS", 3, 2, neps));
    p.studies.push_back(linrelax_study("IMEX1-GSA-ARS", 4, 3, neps));
    p.studies.push_back(linrelax_study("IMEX2-ARS", 4, 0, neps));
    p.studies.push_back(linrelax_study("IMEX2-ARS", 4, 1, neps));
  } else if (name == "fig6") {
    const int neps = full ? 25 : 13;
    const int rungs = full ? 5 : 4;
    p.studies.push_back(nlrelax_study("IMEX1-GSA-ARS", 2, 1, neps, rungs));
    p.studies.push_back(nlrelax_study("IMEX1-GSA-ARS", 3, 2, neps, rungs));
    p.studies.push_back(nlrelax_study("IMEX2-ARS", 4, 1, neps, rungs));
  } else if (name == "table2") {
    const int rungs = full ? 6 : 4;
    p.studies.push_back(burgers_study("IMEX1-GSA-ARS", 2, 1, 1.0 / 96.0, rungs));
    p.studies.push_back(burgers_study("IMEX1-GSA-ARS", 3, 2, 1.0 / 96.0, rungs));
  } else if (name == "table3") {
    const int rungs = full ? 6 : 4;
    p.studies.push_back(burgers_study("IMEX2-ARS", 4, 1, 1.0 / 48.0, rungs));
  } else {
    throw OutOfRange("unknown preset '" + name + "'");
  }
  return p;
}

std::vector<std::string> preset_names() {
  return {"fig1", "fig2", "fig5", "fig6", "table2", "table3"};
}

}  // namespace indc
