#include "indc/tableau.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "indc/errors.hpp"

namespace indc {

namespace {

constexpr double kAbscissaTol = 1e-13;
constexpr double kDetTol = 1e-12;

RkTableau make_rk_rational(const std::vector<std::vector<std::string>>& a,
                           const std::vector<std::string>& b,
                           const std::vector<std::string>& c) {
  const int s = static_cast<int>(b.size());
  RkTableau t;
  t.a = Eigen::MatrixXd::Zero(s, s);
  t.b = Eigen::VectorXd::Zero(s);
  t.c = Eigen::VectorXd::Zero(s);
  t.a_rat = rat_zeros(s, s);
  t.b_rat = RatVector(s, Rational(0));
  t.c_rat = RatVector(s, Rational(0));
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < static_cast<int>(a[i].size()); ++j) {
      (*t.a_rat)[i][j] = parse_rational(a[i][j]);
      t.a(i, j) = to_double((*t.a_rat)[i][j]);
    }
    (*t.b_rat)[i] = parse_rational(b[i]);
    t.b(i) = to_double((*t.b_rat)[i]);
    (*t.c_rat)[i] = parse_rational(c[i]);
    t.c(i) = to_double((*t.c_rat)[i]);
  }
  return t;
}

RkTableau make_rk_double(const std::vector<std::vector<double>>& a,
                         const std::vector<double>& b, const std::vector<double>& c) {
  const int s = static_cast<int>(b.size());
  RkTableau t;
  t.a = Eigen::MatrixXd::Zero(s, s);
  t.b = Eigen::VectorXd::Zero(s);
  t.c = Eigen::VectorXd::Zero(s);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < static_cast<int>(a[i].size()); ++j) t.a(i, j) = a[i][j];
    t.b(i) = b[i];
    t.c(i) = c[i];
  }
  return t;
}

bool rows_equal(const RkTableau& t, const Eigen::VectorXd& lhs, const Eigen::VectorXd& rhs,
                const RatVector* lhs_rat, const RatVector* rhs_rat) {
  if (t.is_rational() && lhs_rat && rhs_rat) return *lhs_rat == *rhs_rat;
  return (lhs - rhs).lpNorm<Eigen::Infinity>() <= kAbscissaTol;
}

/// Scaled-determinant invertibility for small matrices, rank-revealing LU for
/// large ones (the scaled determinant underflows for big assembled tableaus).
bool invertible_numeric(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return false;
  if (n <= 8) {
    Eigen::MatrixXd scaled = a;
    for (int i = 0; i < n; ++i) {
      const double m = scaled.row(i).cwiseAbs().maxCoeff();
      if (m == 0.0) return false;
      scaled.row(i) /= m;
    }
    return std::abs(scaled.determinant()) > kDetTol;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  return lu.rank() == n;
}

bool invertible(const Eigen::MatrixXd& a, const RatMatrix* a_rat, int drop_first) {
  if (a_rat) {
    const int n = static_cast<int>(a_rat->size()) - drop_first;
    if (n <= 0) return false;
    RatMatrix sub = rat_zeros(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sub[i][j] = (*a_rat)[i + drop_first][j + drop_first];
    return rat_determinant(sub) != 0;
  }
  const int n = static_cast<int>(a.rows()) - drop_first;
  if (n <= 0) return false;
  return invertible_numeric(a.bottomRightCorner(n, n));
}

void validate_part(const RkTableau& t, bool strictly_lower, const char* part) {
  const int s = t.stages();
  if (t.a.rows() != s || t.a.cols() != s || t.c.size() != s)
    throw DimensionMismatch(std::string(part) + ": A/b/c dimensions disagree");
  for (int i = 0; i < s; ++i)
    for (int j = strictly_lower ? i : i + 1; j < s; ++j)
      if (t.a(i, j) != 0.0)
        throw NotTriangular(std::string(part) + ": nonzero entry above the diagonal at (" +
                            std::to_string(i) + "," + std::to_string(j) + ")");
  for (int i = 0; i < s; ++i) {
    if (t.is_rational()) {
      Rational sum(0);
      const int jmax = strictly_lower ? i : i + 1;
      for (int j = 0; j < jmax; ++j) sum += (*t.a_rat)[i][j];
      if (sum != (*t.c_rat)[i])
        throw AbscissaInconsistent(std::string(part) + ": row " + std::to_string(i) +
                                       " sum does not match abscissa",
                                   i);
    } else {
      double sum = 0.0;
      const int jmax = strictly_lower ? i : i + 1;
      for (int j = 0; j < jmax; ++j) sum += t.a(i, j);
      if (std::abs(sum - t.c(i)) > kAbscissaTol)
        throw AbscissaInconsistent(std::string(part) + ": row " + std::to_string(i) +
                                       " sum does not match abscissa",
                                   i);
    }
    if (t.c(i) < -kAbscissaTol || t.c(i) > 1.0 + kAbscissaTol)
      throw AbscissaInconsistent(std::string(part) + ": abscissa " + std::to_string(i) +
                                     " outside [0,1]",
                                 i);
  }
}

}  // namespace

std::string to_string(ImexType t) {
  switch (t) {
    case ImexType::TypeA: return "A";
    case ImexType::TypeCK: return "CK";
    case ImexType::TypeARS: return "ARS";
    default: return "other";
  }
}

ImexTableau validate(ImexTableau t) {
  if (t.explicit_part.stages() != t.implicit_part.stages())
    throw DimensionMismatch(t.name + ": explicit and implicit stage counts differ");
  if (t.stages() < 1) throw DimensionMismatch(t.name + ": empty tableau");
  validate_part(t.explicit_part, /*strictly_lower=*/true, "explicit part");
  validate_part(t.implicit_part, /*strictly_lower=*/false, "implicit part");
  t.gsa_flag = is_gsa(t);
  return t;
}

bool is_gsa(const ImexTableau& t) {
  const int s = t.stages();
  const auto& ex = t.explicit_part;
  const auto& im = t.implicit_part;
  if (t.is_rational()) {
    for (int j = 0; j < s; ++j) {
      if ((*ex.b_rat)[j] != (*ex.a_rat)[s - 1][j]) return false;
      if ((*im.b_rat)[j] != (*im.a_rat)[s - 1][j]) return false;
    }
    return (*ex.c_rat)[s - 1] == 1 && (*im.c_rat)[s - 1] == 1;
  }
  if ((ex.b.transpose() - ex.a.row(s - 1)).lpNorm<Eigen::Infinity>() > kAbscissaTol) return false;
  if ((im.b.transpose() - im.a.row(s - 1)).lpNorm<Eigen::Infinity>() > kAbscissaTol) return false;
  return std::abs(ex.c(s - 1) - 1.0) <= kAbscissaTol && std::abs(im.c(s - 1) - 1.0) <= kAbscissaTol;
}

ImexType classify(const ImexTableau& t) {
  const int s = t.stages();
  const auto& im = t.implicit_part;
  const RatMatrix* a_rat = im.a_rat ? &*im.a_rat : nullptr;
  const bool c_equal = rows_equal(im, t.explicit_part.c, im.c,
                                  t.explicit_part.c_rat ? &*t.explicit_part.c_rat : nullptr,
                                  im.c_rat ? &*im.c_rat : nullptr);
  if (invertible(im.a, a_rat, 0) && !c_equal) return ImexType::TypeA;
  const bool zero_first_row = im.a.row(0).cwiseAbs().maxCoeff() == 0.0;
  if (zero_first_row && s >= 2 && c_equal && invertible(im.a, a_rat, 1)) {
    const bool zero_first_col = im.a.col(0).cwiseAbs().maxCoeff() == 0.0;
    return zero_first_col ? ImexType::TypeARS : ImexType::TypeCK;
  }
  return ImexType::Other;
}

double r_infinity(const RkTableau& im) {
  const int s = im.stages();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(s);
  if (invertible(im.a, nullptr, 0)) {
    Eigen::VectorXd x = im.a.fullPivLu().solve(ones);
    return 1.0 - im.b.dot(x);
  }
  // CK reduction: eliminate the first (explicit) stage and take the z -> -inf
  // limit on the remaining invertible subsystem.
  const bool zero_first_row = im.a.row(0).cwiseAbs().maxCoeff() == 0.0;
  if (s >= 2 && zero_first_row && invertible(im.a, nullptr, 1)) {
    const int m = s - 1;
    const Eigen::MatrixXd ahat = im.a.bottomRightCorner(m, m);
    const Eigen::VectorXd acol = im.a.block(1, 0, m, 1);
    const Eigen::VectorXd bhat = im.b.tail(m);
    Eigen::VectorXd w = ahat.transpose().fullPivLu().solve(bhat);
    const double mismatch = im.b(0) - w.dot(acol);
    if (std::abs(mismatch) > 1e-9 * (1.0 + im.b.cwiseAbs().maxCoeff()))
      throw SingularMatrix("r_infinity: limit diverges for this CK tableau");
    const Eigen::VectorXd ainv_a = ahat.fullPivLu().solve(acol);
    return 1.0 - w.sum() - w.dot(ainv_a);
  }
  throw SingularMatrix("r_infinity: neither A nor its CK reduction is invertible");
}

double stability_function(const RkTableau& im, double z) {
  const int s = im.stages();
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(s, s) - z * im.a;
  const Eigen::VectorXd x = m.fullPivLu().solve(Eigen::VectorXd::Ones(s));
  return 1.0 + z * im.b.dot(x);
}

std::vector<ImexTableau> builtin_catalog() {
  std::vector<ImexTableau> out;

  {
    ImexTableau t;
    t.name = "IMEX1-GSA-ARS";
    t.order = 1;
    t.explicit_part = make_rk_rational({{"0", "0"}, {"1", "0"}}, {"1", "0"}, {"0", "1"});
    t.implicit_part = make_rk_rational({{"0", "0"}, {"0", "1"}}, {"0", "1"}, {"0", "1"});
    out.push_back(validate(std::move(t)));
  }
  {
    ImexTableau t;
    t.name = "IMEX1-GSA-A";
    t.order = 1;
    t.explicit_part = make_rk_rational({{"0", "0"}, {"1", "0"}}, {"1", "0"}, {"0", "1"});
    t.implicit_part = make_rk_rational({{"1", "0"}, {"0", "1"}}, {"0", "1"}, {"1", "1"});
    out.push_back(validate(std::move(t)));
  }
  {
    ImexTableau t;
    t.name = "IMEX1-NGSA-A";
    t.order = 1;
    t.explicit_part = make_rk_rational({{"0"}}, {"1"}, {"0"});
    t.implicit_part = make_rk_rational({{"1"}}, {"1"}, {"1"});
    out.push_back(validate(std::move(t)));
  }
  {
    const double g = 1.0 - std::sqrt(2.0) / 2.0;
    const double d = 1.0 - 1.0 / (2.0 * g);
    ImexTableau t;
    t.name = "IMEX2-ARS";
    t.order = 2;
    t.explicit_part =
        make_rk_double({{0, 0, 0}, {g, 0, 0}, {d, 1 - d, 0}}, {d, 1 - d, 0}, {0, g, 1});
    t.implicit_part =
        make_rk_double({{0, 0, 0}, {0, g, 0}, {0, 1 - g, g}}, {0, 1 - g, g}, {0, g, 1});
    out.push_back(validate(std::move(t)));
  }
  {
    const double g = 1.0 - std::sqrt(2.0) / 2.0;
    ImexTableau t;
    t.name = "IMEX2-CK";
    t.order = 2;
    t.explicit_part = make_rk_double(
        {{0, 0, 0}, {2.0 / 3.0, 0, 0}, {0.25, 0.75, 0}}, {0.25, 0.75, 0}, {0, 2.0 / 3.0, 1});
    t.implicit_part = make_rk_double({{0, 0, 0},
                                      {2.0 / 3.0 - g, g, 0},
                                      {0.25 + 0.5 * g, 0.75 - 1.5 * g, g}},
                                     {0.25 + 0.5 * g, 0.75 - 1.5 * g, g},
                                     {0, 2.0 / 3.0, 1});
    out.push_back(validate(std::move(t)));
  }
  {
    ImexTableau t;
    t.name = "IMEX3-ARS";
    t.order = 3;
    t.explicit_part = make_rk_rational({{"0", "0", "0", "0", "0"},
                                        {"1/2", "0", "0", "0", "0"},
                                        {"11/18", "1/18", "0", "0", "0"},
                                        {"5/6", "-5/6", "1/2", "0", "0"},
                                        {"1/4", "7/4", "3/4", "-7/4", "0"}},
                                       {"1/4", "7/4", "3/4", "-7/4", "0"},
                                       {"0", "1/2", "2/3", "1/2", "1"});
    t.implicit_part = make_rk_rational({{"0", "0", "0", "0", "0"},
                                        {"0", "1/2", "0", "0", "0"},
                                        {"0", "1/6", "1/2", "0", "0"},
                                        {"0", "-1/2", "1/2", "1/2", "0"},
                                        {"0", "3/2", "-3/2", "1/2", "1/2"}},
                                       {"0", "3/2", "-3/2", "1/2", "1/2"},
                                       {"0", "1/2", "2/3", "1/2", "1"});
    out.push_back(validate(std::move(t)));
  }
  return out;
}

ImexTableau find_scheme(const std::string& name) {
  std::string key;
  for (char ch : name) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  auto canon = [&]() -> std::string {
    if (key == "imex1-ars" || key == "imex1-gsa-ars" || key == "ars1") return "IMEX1-GSA-ARS";
    if (key == "imex1-a" || key == "imex1-gsa-a") return "IMEX1-GSA-A";
    if (key == "imex1-ngsa" || key == "imex1-ngsa-a") return "IMEX1-NGSA-A";
    if (key == "imex2-ars" || key == "ars2") return "IMEX2-ARS";
    if (key == "imex2-ck" || key == "ck2") return "IMEX2-CK";
    if (key == "imex3-ars" || key == "ars3") return "IMEX3-ARS";
    return "";
  }();
  for (auto& t : builtin_catalog()) {
    if (t.name == canon || key == [&] {
          std::string lower;
          for (char ch : t.name)
            lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
          return lower;
        }())
      return t;
  }
  throw OutOfRange("unknown scheme '" + name + "'");
}

namespace {

std::string format_entry(double v, const Rational* r, TableauFormat fmt) {
  if (r && fmt == TableauFormat::Rational) return format_rational(*r);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit_part(std::ostringstream& os, const RkTableau& t, const char* prefix,
               TableauFormat fmt) {
  const int s = t.stages();
  os << prefix << "-a\n";
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j)
      os << (j ? " " : "")
         << format_entry(t.a(i, j), t.a_rat ? &(*t.a_rat)[i][j] : nullptr, fmt);
    os << "\n";
  }
  os << prefix << "-b\n";
  for (int j = 0; j < s; ++j)
    os << (j ? " " : "") << format_entry(t.b(j), t.b_rat ? &(*t.b_rat)[j] : nullptr, fmt);
  os << "\n" << prefix << "-c\n";
  for (int j = 0; j < s; ++j)
    os << (j ? " " : "") << format_entry(t.c(j), t.c_rat ? &(*t.c_rat)[j] : nullptr, fmt);
  os << "\n";
}

bool looks_rational(const std::string& tok) {
  return tok.find('.') == std::string::npos && tok.find('e') == std::string::npos &&
         tok.find('E') == std::string::npos && tok.find("inf") == std::string::npos &&
         tok.find("nan") == std::string::npos;
}

}  // namespace

std::string emit_tableau(const ImexTableau& t, TableauFormat format) {
  std::ostringstream os;
  os << "imex-tableau\n";
  os << "name " << (t.name.empty() ? "unnamed" : t.name) << "\n";
  os << "order " << t.order << "\n";
  os << "stages " << t.stages() << "\n";
  emit_part(os, t.explicit_part, "explicit", format);
  emit_part(os, t.implicit_part, "implicit", format);
  os << "end\n";
  return os.str();
}

ImexTableau parse_tableau(const std::string& text) {
  std::istringstream is(text);
  std::string tok;
  is >> tok;
  if (tok != "imex-tableau") throw ParseError("parse_tableau: missing header");
  ImexTableau t;
  int s = -1;
  auto read_scalar_block = [&](std::vector<std::string>& dst, int count) {
    dst.resize(count);
    for (int i = 0; i < count; ++i)
      if (!(is >> dst[i])) throw ParseError("parse_tableau: truncated block");
  };
  std::vector<std::string> ea, eb, ec, ia, ib, ic;
  while (is >> tok) {
    if (tok == "name") {
      is >> t.name;
    } else if (tok == "order") {
      is >> t.order;
    } else if (tok == "stages") {
      is >> s;
      if (s < 1 || s > 4096) throw ParseError("parse_tableau: bad stage count");
    } else if (tok == "explicit-a") {
      read_scalar_block(ea, s * s);
    } else if (tok == "explicit-b") {
      read_scalar_block(eb, s);
    } else if (tok == "explicit-c") {
      read_scalar_block(ec, s);
    } else if (tok == "implicit-a") {
      read_scalar_block(ia, s * s);
    } else if (tok == "implicit-b") {
      read_scalar_block(ib, s);
    } else if (tok == "implicit-c") {
      read_scalar_block(ic, s);
    } else if (tok == "end") {
      break;
    } else {
      throw ParseError("parse_tableau: unexpected token '" + tok + "'");
    }
  }
  if (s < 1 || ea.empty() || eb.empty() || ec.empty() || ia.empty() || ib.empty() || ic.empty())
    throw ParseError("parse_tableau: incomplete tableau");

  bool rational = true;
  for (const auto* block : {&ea, &eb, &ec, &ia, &ib, &ic})
    for (const auto& e : *block) rational = rational && looks_rational(e);

  auto build = [&](const std::vector<std::string>& a, const std::vector<std::string>& b,
                   const std::vector<std::string>& c) {
    RkTableau rk;
    rk.a = Eigen::MatrixXd::Zero(s, s);
    rk.b = Eigen::VectorXd::Zero(s);
    rk.c = Eigen::VectorXd::Zero(s);
    if (rational) {
      rk.a_rat = rat_zeros(s, s);
      rk.b_rat = RatVector(s, Rational(0));
      rk.c_rat = RatVector(s, Rational(0));
    }
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        if (rational) {
          (*rk.a_rat)[i][j] = parse_rational(a[i * s + j]);
          rk.a(i, j) = to_double((*rk.a_rat)[i][j]);
        } else {
          rk.a(i, j) = std::stod(a[i * s + j]);
        }
      }
      if (rational) {
        (*rk.b_rat)[i] = parse_rational(b[i]);
        rk.b(i) = to_double((*rk.b_rat)[i]);
        (*rk.c_rat)[i] = parse_rational(c[i]);
        rk.c(i) = to_double((*rk.c_rat)[i]);
      } else {
        rk.b(i) = std::stod(b[i]);
        rk.c(i) = std::stod(c[i]);
      }
    }
    return rk;
  };
  t.explicit_part = build(ea, eb, ec);
  t.implicit_part = build(ia, ib, ic);
  return validate(std::move(t));
}

bool exactly_equal(const ImexTableau& a, const ImexTableau& b) {
  if (!a.is_rational() || !b.is_rational()) return false;
  if (a.stages() != b.stages()) return false;
  const auto eq_part = [](const RkTableau& x, const RkTableau& y) {
    return *x.a_rat == *y.a_rat && *x.b_rat == *y.b_rat && *x.c_rat == *y.c_rat;
  };
  return eq_part(a.explicit_part, b.explicit_part) && eq_part(a.implicit_part, b.implicit_part);
}

}  // namespace indc
