#ifndef INDC_ASSEMBLY_HPP
#define INDC_ASSEMBLY_HPP

#include <string>

#include "indc/tableau.hpp"

namespace indc {

/// The single large double Butcher tableau equivalent to one whole InDC step
/// (prediction plus K corrections). For GSA bases the stage count is
/// s_eff*M*(K+1), plus one leading zero stage when the base's first stage has
/// no implicit content (ARS/CK layout, s_eff = s-1). For the first-order
/// non-GSA type-A base the duplicated-row layout of size 2*M*(K+1) is
/// produced instead.
struct AssembledTableau {
  ImexTableau tableau;
  ImexTableau base;
  int num_nodes = 0;    // M
  int corrections = 0;  // K

  // Per-sweep coupling blocks of the invertible part: T on the diagonal,
  // P on the subdiagonal (empty when K = 0); tilde variants for the explicit
  // part.
  Eigen::MatrixXd block_t, block_t_tilde, block_p, block_p_tilde;
};

/// Unrolls the InDC loop symbolically (each stage value is an affine
/// combination of rhs samples; coefficients are read off as tableau entries).
/// Exact rational arithmetic end to end when the base is rational.
/// Throws TooLarge when s*M*(K+1) > 1024 and UnsupportedStructure when the
/// base is neither GSA nor the documented 1-stage non-GSA pattern.
AssembledTableau assemble(const ImexTableau& base, int num_nodes, int corrections);

struct AnalysisReport {
  bool gsa = false;
  ImexType type = ImexType::Other;
  bool implicit_invertible = false;
  bool det_identity_holds = false;
};

/// GSA / classification / invertibility of the implicit assembled matrix
/// (exact rational determinant when available), plus the block determinant
/// identities det(T) = ((1/M) det(A_base))^M and det(A) = det(T)^(K+1).
AnalysisReport analyze(const AssembledTableau& a);

/// Text form of the assembled double tableau; round-trips through
/// parse_tableau.
std::string emit(const AssembledTableau& a, TableauFormat format);

}  // namespace indc

#endif
