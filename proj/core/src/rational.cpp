#include "indc/rational.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace indc {

RatMatrix rat_zeros(int rows, int cols) {
  return RatMatrix(rows, RatVector(cols, Rational(0)));
}

Rational rat_determinant(RatMatrix a) {
  const int n = static_cast<int>(a.size());
  Rational det(1);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r) {
      if (a[r][col] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) return Rational(0);
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (int r = col + 1; r < n; ++r) {
      if (a[r][col] == 0) continue;
      const Rational factor = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  return det;
}

RatVector rat_solve(RatMatrix a, RatVector rhs) {
  const int n = static_cast<int>(a.size());
  if (static_cast<int>(rhs.size()) != n) throw DimensionMismatch("rat_solve: size mismatch");
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r) {
      if (a[r][col] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) throw SingularMatrix("rat_solve: singular matrix");
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      std::swap(rhs[pivot], rhs[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      if (a[r][col] == 0) continue;
      const Rational factor = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      rhs[r] -= factor * rhs[col];
    }
  }
  RatVector x(n, Rational(0));
  for (int r = n - 1; r >= 0; --r) {
    Rational acc = rhs[r];
    for (int c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return x;
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      return Rational(boost::multiprecision::cpp_int(text));
    }
    boost::multiprecision::cpp_int num(text.substr(0, slash));
    boost::multiprecision::cpp_int den(text.substr(slash + 1));
    if (den == 0) throw ParseError("parse_rational: zero denominator in '" + text + "'");
    return Rational(num, den);
  } catch (const std::exception&) {
    throw ParseError("parse_rational: bad literal '" + text + "'");
  }
}

std::string format_rational(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace indc
