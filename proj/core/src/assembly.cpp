#include "indc/assembly.hpp"

#include <cmath>

#include "indc/errors.hpp"
#include "indc/quadrature.hpp"

namespace indc {

namespace {

template <class S>
struct UnrollInput {
  int s = 0, m_nodes = 0, corrections = 0;
  std::vector<std::vector<S>> ea, ia;                    // base matrices
  std::vector<S> ec, ic;                                 // base abscissae
  std::vector<std::vector<std::vector<S>>> s_ex, p_ex;   // [m][i][l]
  std::vector<std::vector<std::vector<S>>> s_im, p_im;
  std::vector<std::vector<S>> s_sub;                     // [m][l], unit-interval scale
  S inv_m;
  std::vector<bool> im_row_zero;        // per stage of the base
  std::vector<bool> ex_at_left_node;    // c̃_i = 0
  bool sharable = false;                // first stage carries no implicit content
};

template <class S>
struct UnrollResult {
  int ncols = 0;
  std::vector<std::vector<S>> ex_rows, im_rows;
  std::vector<S> cex, cim;
};

template <class S>
S scalar_from_int(int v) {
  return S(v);
}

bool is_zero(const Rational& v) { return v == 0; }
bool is_zero(double v) { return v == 0.0; }

template <class S>
UnrollResult<S> unroll_gsa(const UnrollInput<S>& in) {
  const int s = in.s, m_nodes = in.m_nodes, corrections = in.corrections;
  const int s_eff = in.sharable ? s - 1 : s;
  const int ncols = (in.sharable ? 1 : 0) + s_eff * m_nodes * (corrections + 1);

  UnrollResult<S> out;
  out.ncols = ncols;
  out.ex_rows.assign(ncols, std::vector<S>(ncols, S(0)));
  out.im_rows.assign(ncols, std::vector<S>(ncols, S(0)));
  out.cex.assign(ncols, S(0));
  out.cim.assign(ncols, S(0));

  auto zero_row = [&] { return std::vector<S>(ncols, S(0)); };
  auto axpy = [&](std::vector<S>& dst, const S& alpha, const std::vector<S>& src) {
    if (is_zero(alpha)) return;
    for (int c = 0; c < ncols; ++c)
      if (!is_zero(src[c])) dst[c] += alpha * src[c];
  };

  int next_col = 0;
  int leading = -1;
  if (in.sharable) leading = next_col++;  // stage pair (y_n, z_n); zero rows, abscissa 0

  std::vector<int> prev_node_col;  // sample columns of the previous sweep, nodes 1..M

  for (int k = 0; k <= corrections; ++k) {
    std::vector<std::vector<S>> ynode(m_nodes + 1), znode(m_nodes + 1);
    std::vector<int> node_col(m_nodes + 1, leading);
    ynode[0] = zero_row();
    znode[0] = zero_row();

    for (int m = 0; m < m_nodes; ++m) {
      std::vector<int> scol(s, -1);
      std::vector<std::vector<S>> dfrow(s), dgrow(s);

      auto node_delta = [&](const std::vector<S>& prow) {
        // current node sample minus interpolated previous-sweep samples;
        // identically zero at the anchored left endpoint
        std::vector<S> row = zero_row();
        if (m == 0 || k == 0) return row;
        row[node_col[m]] += S(1);
        for (int l = 0; l < m_nodes; ++l)
          if (!is_zero(prow[l])) row[prev_node_col[l]] -= prow[l];
        return row;
      };

      for (int i = 0; i < s; ++i) {
        if (in.sharable && i == 0) {
          scol[i] = node_col[m];
          if (k > 0) {
            dfrow[i] = node_delta(in.p_ex[m][i]);
            dgrow[i] = node_delta(in.p_im[m][i]);
          }
          continue;
        }
        const int col = next_col++;
        scol[i] = col;

        std::vector<S> yrow = ynode[m];
        if (k > 0)
          for (int l = 0; l < m_nodes; ++l)
            if (!is_zero(in.s_ex[m][i][l])) yrow[prev_node_col[l]] += in.s_ex[m][i][l];
        for (int j = 0; j < i; ++j) {
          const S aij = in.ea[i][j];
          if (is_zero(aij)) continue;
          if (k == 0)
            yrow[scol[j]] += aij * in.inv_m;
          else
            axpy(yrow, aij * in.inv_m, dfrow[j]);
        }
        out.ex_rows[col] = yrow;

        std::vector<S> zrow = znode[m];
        if (k > 0)
          for (int l = 0; l < m_nodes; ++l)
            if (!is_zero(in.s_im[m][i][l])) zrow[prev_node_col[l]] += in.s_im[m][i][l];
        for (int j = 0; j <= i; ++j) {
          const S aij = in.ia[i][j];
          if (is_zero(aij)) continue;
          if (k == 0) {
            zrow[scol[j]] += aij * in.inv_m;
          } else if (j < i) {
            axpy(zrow, aij * in.inv_m, dgrow[j]);
          } else {
            zrow[col] += aij * in.inv_m;
            for (int l = 0; l < m_nodes; ++l)
              if (!is_zero(in.p_im[m][i][l]))
                zrow[prev_node_col[l]] -= aij * in.inv_m * in.p_im[m][i][l];
          }
        }
        out.im_rows[col] = zrow;

        out.cex[col] = (scalar_from_int<S>(m) + in.ec[i]) * in.inv_m;
        out.cim[col] = (scalar_from_int<S>(m) + in.ic[i]) * in.inv_m;

        if (k > 0 && k < corrections + 1) {
          if (in.ex_at_left_node[i]) {
            dfrow[i] = node_delta(in.p_ex[m][i]);
          } else {
            dfrow[i] = zero_row();
            dfrow[i][col] += S(1);
            for (int l = 0; l < m_nodes; ++l)
              if (!is_zero(in.p_ex[m][i][l])) dfrow[i][prev_node_col[l]] -= in.p_ex[m][i][l];
          }
          if (in.im_row_zero[i]) {
            dgrow[i] = node_delta(in.p_im[m][i]);
          } else {
            dgrow[i] = zero_row();
            dgrow[i][col] += S(1);
            for (int l = 0; l < m_nodes; ++l)
              if (!is_zero(in.p_im[m][i][l])) dgrow[i][prev_node_col[l]] -= in.p_im[m][i][l];
          }
        }
      }
      // GSA base: the node value is the last stage pair.
      ynode[m + 1] = out.ex_rows[scol[s - 1]];
      znode[m + 1] = out.im_rows[scol[s - 1]];
      node_col[m + 1] = scol[s - 1];
    }
    prev_node_col.assign(node_col.begin() + 1, node_col.end());
  }
  if (next_col != ncols) throw Error("assemble: internal stage count mismatch");
  return out;
}

/// Duplicated-row layout of the first-order non-GSA type-A base: per substep
/// one solver stage plus one output stage holding the node values, size
/// 2*M*(K+1). Correction deltas are solver-stage differences between
/// consecutive sweeps.
template <class S>
UnrollResult<S> unroll_ngsa_first_order(const UnrollInput<S>& in) {
  const int m_nodes = in.m_nodes, corrections = in.corrections;
  const int ncols = 2 * m_nodes * (corrections + 1);
  const S alpha = in.ia[0][0];

  UnrollResult<S> out;
  out.ncols = ncols;
  out.ex_rows.assign(ncols, std::vector<S>(ncols, S(0)));
  out.im_rows.assign(ncols, std::vector<S>(ncols, S(0)));
  out.cex.assign(ncols, S(0));
  out.cim.assign(ncols, S(0));

  auto zero_row = [&] { return std::vector<S>(ncols, S(0)); };

  int next_col = 0;
  std::vector<int> prev_solver_col(m_nodes, -1), prev_output_col(m_nodes, -1);

  for (int k = 0; k <= corrections; ++k) {
    std::vector<std::vector<S>> ynode(m_nodes + 1), znode(m_nodes + 1);
    ynode[0] = zero_row();
    znode[0] = zero_row();
    std::vector<int> solver_col(m_nodes, -1), output_col(m_nodes, -1);

    for (int m = 0; m < m_nodes; ++m) {
      const int sc = next_col++;
      solver_col[m] = sc;
      out.ex_rows[sc] = ynode[m];
      std::vector<S> zrow = znode[m];
      if (k == 0) {
        zrow[sc] += alpha * in.inv_m;
      } else {
        for (int l = 0; l < m_nodes; ++l)
          if (!is_zero(in.s_im[m][0][l])) zrow[prev_output_col[l]] += in.s_im[m][0][l];
        zrow[sc] += alpha * in.inv_m;
        zrow[prev_solver_col[m]] -= alpha * in.inv_m;
      }
      out.im_rows[sc] = zrow;
      out.cex[sc] = scalar_from_int<S>(m) * in.inv_m;
      out.cim[sc] = (scalar_from_int<S>(m) + in.ic[0]) * in.inv_m;

      ynode[m + 1] = ynode[m];
      znode[m + 1] = znode[m];
      if (k == 0) {
        ynode[m + 1][sc] += in.inv_m;
        znode[m + 1][sc] += in.inv_m;
      } else {
        for (int l = 0; l < m_nodes; ++l) {
          if (!is_zero(in.s_sub[m][l])) {
            ynode[m + 1][prev_output_col[l]] += in.s_sub[m][l];
            znode[m + 1][prev_output_col[l]] += in.s_sub[m][l];
          }
        }
        ynode[m + 1][sc] += in.inv_m;
        ynode[m + 1][prev_solver_col[m]] -= in.inv_m;
        znode[m + 1][sc] += in.inv_m;
        znode[m + 1][prev_solver_col[m]] -= in.inv_m;
      }

      const int oc = next_col++;
      output_col[m] = oc;
      out.ex_rows[oc] = ynode[m + 1];
      out.im_rows[oc] = znode[m + 1];
      out.cex[oc] = scalar_from_int<S>(m + 1) * in.inv_m;
      out.cim[oc] = scalar_from_int<S>(m + 1) * in.inv_m;
    }
    prev_solver_col = solver_col;
    prev_output_col = output_col;
  }
  if (next_col != ncols) throw Error("assemble: internal stage count mismatch");
  return out;
}

UnrollInput<Rational> make_input_exact(const ImexTableau& base, const QuadratureSet& quad, int k) {
  const int s = base.stages();
  const int m_nodes = quad.num_nodes();
  UnrollInput<Rational> in;
  in.s = s;
  in.m_nodes = m_nodes;
  in.corrections = k;
  in.ea = *base.explicit_part.a_rat;
  in.ia = *base.implicit_part.a_rat;
  in.ec = *base.explicit_part.c_rat;
  in.ic = *base.implicit_part.c_rat;
  in.inv_m = Rational(1, m_nodes);
  in.s_sub = quad.s_sub_exact();
  in.s_ex.resize(m_nodes);
  in.p_ex.resize(m_nodes);
  in.s_im.resize(m_nodes);
  in.p_im.resize(m_nodes);
  for (int m = 0; m < m_nodes; ++m) {
    in.s_ex[m].resize(s);
    in.p_ex[m].resize(s);
    in.s_im[m].resize(s);
    in.p_im[m].resize(s);
    for (int i = 0; i < s; ++i) {
      auto re = quad.stage_row_exact(m, in.ec[i]);
      auto ri = quad.stage_row_exact(m, in.ic[i]);
      in.s_ex[m][i] = re.integration;
      in.p_ex[m][i] = re.interpolation;
      in.s_im[m][i] = ri.integration;
      in.p_im[m][i] = ri.interpolation;
    }
  }
  in.im_row_zero.resize(s);
  in.ex_at_left_node.resize(s);
  for (int i = 0; i < s; ++i) {
    bool zero = true;
    for (int j = 0; j < s; ++j) zero = zero && in.ia[i][j] == 0;
    in.im_row_zero[i] = zero;
    in.ex_at_left_node[i] = in.ec[i] == 0;
  }
  in.sharable = in.im_row_zero[0];
  return in;
}

UnrollInput<double> make_input_double(const ImexTableau& base, const QuadratureSet& quad, int k) {
  const int s = base.stages();
  const int m_nodes = quad.num_nodes();
  UnrollInput<double> in;
  in.s = s;
  in.m_nodes = m_nodes;
  in.corrections = k;
  in.ea.assign(s, std::vector<double>(s, 0.0));
  in.ia.assign(s, std::vector<double>(s, 0.0));
  in.ec.resize(s);
  in.ic.resize(s);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      in.ea[i][j] = base.explicit_part.a(i, j);
      in.ia[i][j] = base.implicit_part.a(i, j);
    }
    in.ec[i] = base.explicit_part.c(i);
    in.ic[i] = base.implicit_part.c(i);
  }
  in.inv_m = 1.0 / m_nodes;
  in.s_sub.assign(m_nodes, std::vector<double>(m_nodes, 0.0));
  for (int m = 0; m < m_nodes; ++m)
    for (int l = 0; l < m_nodes; ++l) in.s_sub[m][l] = quad.s_sub()(m, l);
  in.s_ex.resize(m_nodes);
  in.p_ex.resize(m_nodes);
  in.s_im.resize(m_nodes);
  in.p_im.resize(m_nodes);
  for (int m = 0; m < m_nodes; ++m) {
    in.s_ex[m].resize(s);
    in.p_ex[m].resize(s);
    in.s_im[m].resize(s);
    in.p_im[m].resize(s);
    for (int i = 0; i < s; ++i) {
      auto re = stage_rows_auto(quad, m, in.ec[i], nullptr);
      auto ri = stage_rows_auto(quad, m, in.ic[i], nullptr);
      const int mn = m_nodes;
      in.s_ex[m][i].assign(re.integration.data(), re.integration.data() + mn);
      in.p_ex[m][i].assign(re.interpolation.data(), re.interpolation.data() + mn);
      in.s_im[m][i].assign(ri.integration.data(), ri.integration.data() + mn);
      in.p_im[m][i].assign(ri.interpolation.data(), ri.interpolation.data() + mn);
    }
  }
  in.im_row_zero.resize(s);
  in.ex_at_left_node.resize(s);
  for (int i = 0; i < s; ++i) {
    in.im_row_zero[i] = base.implicit_part.a.row(i).cwiseAbs().maxCoeff() == 0.0;
    in.ex_at_left_node[i] = std::abs(in.ec[i]) <= 1e-14;
  }
  in.sharable = in.im_row_zero[0];
  return in;
}

ImexTableau tableau_from_rows_exact(const UnrollResult<Rational>& r, const std::string& name,
                                    int order) {
  const int n = r.ncols;
  ImexTableau t;
  t.name = name;
  t.order = order;
  auto fill = [&](RkTableau& part, const std::vector<std::vector<Rational>>& rows,
                  const std::vector<Rational>& c) {
    part.a = Eigen::MatrixXd::Zero(n, n);
    part.b = Eigen::VectorXd::Zero(n);
    part.c = Eigen::VectorXd::Zero(n);
    part.a_rat = rat_zeros(n, n);
    part.b_rat = RatVector(n, Rational(0));
    part.c_rat = RatVector(n, Rational(0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        (*part.a_rat)[i][j] = rows[i][j];
        part.a(i, j) = to_double(rows[i][j]);
      }
      (*part.b_rat)[i] = rows[n - 1][i];
      part.b(i) = to_double(rows[n - 1][i]);
      (*part.c_rat)[i] = c[i];
      part.c(i) = to_double(c[i]);
    }
  };
  fill(t.explicit_part, r.ex_rows, r.cex);
  fill(t.implicit_part, r.im_rows, r.cim);
  return validate(std::move(t));
}

ImexTableau tableau_from_rows_double(const UnrollResult<double>& r, const std::string& name,
                                     int order) {
  const int n = r.ncols;
  ImexTableau t;
  t.name = name;
  t.order = order;
  auto fill = [&](RkTableau& part, const std::vector<std::vector<double>>& rows,
                  const std::vector<double>& c) {
    part.a = Eigen::MatrixXd::Zero(n, n);
    part.b = Eigen::VectorXd::Zero(n);
    part.c = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) part.a(i, j) = rows[i][j];
      part.b(i) = rows[n - 1][i];
      part.c(i) = c[i];
    }
  };
  fill(t.explicit_part, r.ex_rows, r.cex);
  fill(t.implicit_part, r.im_rows, r.cim);
  return validate(std::move(t));
}

bool ngsa_first_order_pattern(const ImexTableau& base) {
  return base.stages() == 1 && !base.gsa_flag && base.implicit_part.a(0, 0) != 0.0;
}

}  // namespace

AssembledTableau assemble(const ImexTableau& base_in, int num_nodes, int corrections) {
  ImexTableau base = validate(base_in);
  if (num_nodes < 1 || num_nodes > 32) throw InvalidM("assemble: M must be in [1, 32]");
  if (corrections < 0) throw OutOfRange("assemble: K must be nonnegative");
  const long total = static_cast<long>(base.stages()) * num_nodes * (corrections + 1);
  if (total > 1024) throw TooLarge("assemble: s*M*(K+1) exceeds 1024 stages");
  if (!base.gsa_flag && !ngsa_first_order_pattern(base))
    throw UnsupportedStructure(
        "assemble: base must be GSA or the first-order non-GSA type-A pattern");

  const QuadratureSet quad = build_quadrature(num_nodes);
  const std::string name = "InDC-" + base.name + "-" + std::to_string(num_nodes) + "-" +
                           std::to_string(corrections);
  const int order = std::min(base.order * (corrections + 1), num_nodes);

  AssembledTableau out;
  out.base = base;
  out.num_nodes = num_nodes;
  out.corrections = corrections;

  const bool ngsa = ngsa_first_order_pattern(base);
  bool sharable = false;
  if (base.is_rational()) {
    auto in = make_input_exact(base, quad, corrections);
    sharable = in.sharable;
    auto rows = ngsa ? unroll_ngsa_first_order(in) : unroll_gsa(in);
    out.tableau = tableau_from_rows_exact(rows, name, order);
  } else {
    auto in = make_input_double(base, quad, corrections);
    sharable = in.sharable;
    auto rows = ngsa ? unroll_ngsa_first_order(in) : unroll_gsa(in);
    out.tableau = tableau_from_rows_double(rows, name, order);
  }

  const int offset = (!ngsa && sharable) ? 1 : 0;
  const int s_eff = ngsa ? 2 : (sharable ? base.stages() - 1 : base.stages());
  const int bs = s_eff * num_nodes;
  out.block_t = out.tableau.implicit_part.a.block(offset, offset, bs, bs);
  out.block_t_tilde = out.tableau.explicit_part.a.block(offset, offset, bs, bs);
  if (corrections >= 1) {
    out.block_p = out.tableau.implicit_part.a.block(offset + bs, offset, bs, bs);
    out.block_p_tilde = out.tableau.explicit_part.a.block(offset + bs, offset, bs, bs);
  }
  return out;
}

namespace {

Rational rat_power(Rational base, int e) {
  Rational acc(1);
  for (int i = 0; i < e; ++i) acc *= base;
  return acc;
}

RatMatrix rat_submatrix(const RatMatrix& a, int offset, int n) {
  RatMatrix sub = rat_zeros(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sub[i][j] = a[i + offset][j + offset];
  return sub;
}

}  // namespace

AnalysisReport analyze(const AssembledTableau& a) {
  AnalysisReport rep;
  rep.gsa = is_gsa(a.tableau);
  rep.type = classify(a.tableau);

  const ImexTableau& tab = a.tableau;
  const int n = tab.stages();
  const bool drop_first = rep.type == ImexType::TypeCK || rep.type == ImexType::TypeARS;
  const int off = drop_first ? 1 : 0;
  const int sub_n = n - off;

  const bool base_sharable = a.base.implicit_part.a.row(0).cwiseAbs().maxCoeff() == 0.0 &&
                             a.base.stages() > 1;
  const int m_nodes = a.num_nodes;
  const int bs = static_cast<int>(a.block_t.rows());

  if (tab.is_rational()) {
    const RatMatrix& big = *tab.implicit_part.a_rat;
    const Rational det_sub = rat_determinant(rat_submatrix(big, off, sub_n));
    rep.implicit_invertible = det_sub != 0;

    const int t_off = (n - bs * (a.corrections + 1));  // leading stages before the T block
    const Rational det_t = rat_determinant(rat_submatrix(big, t_off, bs));
    RatMatrix base_sub = base_sharable
                             ? rat_submatrix(*a.base.implicit_part.a_rat, 1, a.base.stages() - 1)
                             : *a.base.implicit_part.a_rat;
    const Rational det_base = rat_determinant(base_sub);
    const Rational lhs1 = det_t;
    const Rational rhs1 = rat_power(det_base / Rational(m_nodes), m_nodes);
    const Rational det_big = rat_determinant(rat_submatrix(big, t_off, bs * (a.corrections + 1)));
    const Rational rhs2 = rat_power(det_t, a.corrections + 1);
    rep.det_identity_holds = (lhs1 == rhs1) && (det_big == rhs2);
  } else {
    const Eigen::MatrixXd sub = tab.implicit_part.a.bottomRightCorner(sub_n, sub_n);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    rep.implicit_invertible = lu.rank() == sub_n;

    const int t_off = n - bs * (a.corrections + 1);
    const double det_t = a.block_t.determinant();
    Eigen::MatrixXd base_sub =
        base_sharable
            ? a.base.implicit_part.a
                  .bottomRightCorner(a.base.stages() - 1, a.base.stages() - 1)
                  .eval()
            : a.base.implicit_part.a;
    const double rhs1 = std::pow(base_sub.determinant() / m_nodes, m_nodes);
    const double det_big = tab.implicit_part.a
                               .block(t_off, t_off, bs * (a.corrections + 1),
                                      bs * (a.corrections + 1))
                               .determinant();
    const double rhs2 = std::pow(det_t, a.corrections + 1);
    auto close = [](double x, double y) {
      return std::abs(x - y) <= 1e-12 * std::max({std::abs(x), std::abs(y), 1e-300});
    };
    rep.det_identity_holds = close(det_t, rhs1) && close(det_big, rhs2);
  }
  return rep;
}

std::string emit(const AssembledTableau& a, TableauFormat format) {
  return emit_tableau(a.tableau, format);
}

}  // namespace indc
