#ifndef INDC_INDC_HPP
#define INDC_INDC_HPP

#include <string>
#include <vector>

#include "indc/quadrature.hpp"
#include "indc/stepper.hpp"

namespace indc {

/// An InDC configuration: base IMEX tableau, M uniform nodes per step and K
/// correction sweeps, with all per-stage quadrature/interpolation rows
/// precomputed (they are loop invariants).
///
/// Heterogeneous correction schemes are representable via correction_bases;
/// by default every sweep reuses the prediction base.
class IndcScheme {
 public:
  struct StageRows {
    Eigen::RowVectorXd s_ex, p_ex;  // integration/interpolation at m + c̃_i
    Eigen::RowVectorXd s_im, p_im;  // integration/interpolation at m + c_i
    bool ex_at_left_node = false;   // c̃_i = 0: explicit delta uses the node sample
    bool im_row_zero = false;       // stage has no implicit content
  };

  IndcScheme(ImexTableau base, int num_nodes, int corrections,
             std::vector<ImexTableau> correction_bases = {});

  const ImexTableau& base() const { return bases_.front(); }
  const ImexTableau& base_for_sweep(int k) const {
    return bases_[bases_.size() == 1 ? 0 : static_cast<size_t>(k)];
  }
  int num_nodes() const { return m_; }
  int corrections() const { return k_; }
  const QuadratureSet& quadrature() const { return quad_; }
  const StageRows& rows(int sweep, int m, int stage) const {
    return rows_[bases_.size() == 1 ? 0 : static_cast<size_t>(sweep)][m][stage];
  }

  /// s_K = sum of the classical orders over prediction and corrections,
  /// capped at M.
  int predicted_order() const;

  /// e.g. "InDC-IMEX1-GSA-ARS-7-3"
  std::string label() const;

 private:
  std::vector<ImexTableau> bases_;  // [0] = prediction base; [k] = sweep k when heterogeneous
  int m_ = 0;
  int k_ = 0;
  QuadratureSet quad_;
  std::vector<std::vector<std::vector<StageRows>>> rows_;  // [base][m][stage]
};

/// Node values and cached rhs samples of one sweep. Index 0 holds the step's
/// initial condition (anchored for every iterate); samples are kept at nodes
/// 1..M.
struct NodeSweep {
  std::vector<Vector> u;  // size M+1
  std::vector<Vector> f;  // size M+1, [0] unused
  std::vector<Vector> g;  // size M+1, [0] unused
};

/// Loop-based InDC integrator: one prediction plus K correction sweeps per
/// time step H. Owns mutable sweep buffers; use one instance per concurrent
/// integration.
class IndcIntegrator {
 public:
  IndcIntegrator(IndcScheme scheme, const SplitProblem* problem, StepperOptions opts = {});

  NodeSweep predict(const StepState& s, double big_h);
  NodeSweep correct(const NodeSweep& prev, const StepState& s, double big_h, int sweep);

  /// predict + K corrections; the result is the value at tau_M of the final
  /// sweep.
  StepState step(const StepState& s, double big_h);

  StepState integrate(StepState s, double t1, double big_h,
                      const std::function<void(const StepState&)>& on_step = {});

  const IndcScheme& scheme() const { return scheme_; }

 private:
  NodeSweep correct_partitioned(const NodeSweep& prev, const StepState& s, double big_h, int sweep);
  NodeSweep correct_additive(const NodeSweep& prev, const StepState& s, double big_h, int sweep);

  IndcScheme scheme_;
  const SplitProblem* problem_;
  StepperOptions opts_;
  ImexStepper predictor_;
  WorkCounters work_;
};

}  // namespace indc

#endif
