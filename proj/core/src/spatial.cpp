#include "indc/spatial.hpp"

#include <cmath>
#include <vector>

#include "indc/errors.hpp"

namespace indc {

namespace {

constexpr double kWenoEps = 1e-6;

inline int wrap(int j, int n) { return ((j % n) + n) % n; }

}  // namespace

Grid1D make_grid(int n, double a, double b) {
  if (n < 8) throw StencilTooSmall("make_grid: WENO5 needs at least 8 cells");
  if (!(b > a)) throw OutOfRange("make_grid: empty domain");
  return Grid1D{n, a, b, true};
}

Eigen::VectorXd weno5_reconstruct_left(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  if (n < 5) throw StencilTooSmall("weno5: need at least 5 cells");
  Eigen::VectorXd h(n);
  for (int j = 0; j < n; ++j) {
    const double vm2 = v(wrap(j - 2, n)), vm1 = v(wrap(j - 1, n)), v0 = v(j),
                 vp1 = v(wrap(j + 1, n)), vp2 = v(wrap(j + 2, n));
    const double q0 = (2.0 * vm2 - 7.0 * vm1 + 11.0 * v0) / 6.0;
    const double q1 = (-vm1 + 5.0 * v0 + 2.0 * vp1) / 6.0;
    const double q2 = (2.0 * v0 + 5.0 * vp1 - vp2) / 6.0;
    const double b0 = (13.0 / 12.0) * std::pow(vm2 - 2.0 * vm1 + v0, 2) +
                      0.25 * std::pow(vm2 - 4.0 * vm1 + 3.0 * v0, 2);
    const double b1 =
        (13.0 / 12.0) * std::pow(vm1 - 2.0 * v0 + vp1, 2) + 0.25 * std::pow(vm1 - vp1, 2);
    const double b2 = (13.0 / 12.0) * std::pow(v0 - 2.0 * vp1 + vp2, 2) +
                      0.25 * std::pow(3.0 * v0 - 4.0 * vp1 + vp2, 2);
    const double w0 = 0.1 / std::pow(kWenoEps + b0, 2);
    const double w1 = 0.6 / std::pow(kWenoEps + b1, 2);
    const double w2 = 0.3 / std::pow(kWenoEps + b2, 2);
    h(j) = (w0 * q0 + w1 * q1 + w2 * q2) / (w0 + w1 + w2);
  }
  return h;
}

Eigen::VectorXd weno5_reconstruct_right(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  if (n < 5) throw StencilTooSmall("weno5: need at least 5 cells");
  Eigen::VectorXd h(n);
  for (int j = 0; j < n; ++j) {
    const double vm1 = v(wrap(j - 1, n)), v0 = v(j), vp1 = v(wrap(j + 1, n)),
                 vp2 = v(wrap(j + 2, n)), vp3 = v(wrap(j + 3, n));
    const double q0 = (2.0 * vp3 - 7.0 * vp2 + 11.0 * vp1) / 6.0;
    const double q1 = (-vp2 + 5.0 * vp1 + 2.0 * v0) / 6.0;
    const double q2 = (2.0 * vp1 + 5.0 * v0 - vm1) / 6.0;
    const double b0 = (13.0 / 12.0) * std::pow(vp3 - 2.0 * vp2 + vp1, 2) +
                      0.25 * std::pow(vp3 - 4.0 * vp2 + 3.0 * vp1, 2);
    const double b1 =
        (13.0 / 12.0) * std::pow(vp2 - 2.0 * vp1 + v0, 2) + 0.25 * std::pow(vp2 - v0, 2);
    const double b2 = (13.0 / 12.0) * std::pow(vp1 - 2.0 * v0 + vm1, 2) +
                      0.25 * std::pow(3.0 * vp1 - 4.0 * v0 + vm1, 2);
    const double w0 = 0.1 / std::pow(kWenoEps + b0, 2);
    const double w1 = 0.6 / std::pow(kWenoEps + b1, 2);
    const double w2 = 0.3 / std::pow(kWenoEps + b2, 2);
    h(j) = (w0 * q0 + w1 * q1 + w2 * q2) / (w0 + w1 + w2);
  }
  return h;
}

Eigen::MatrixXd weno5_flux_derivative(
    const Grid1D& grid, const Eigen::MatrixXd& state,
    const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& flux, double alpha) {
  const int ncomp = static_cast<int>(state.rows());
  const int n = static_cast<int>(state.cols());
  if (n != grid.n) throw DimensionMismatch("weno5_flux_derivative: state/grid size mismatch");
  if (n < 8) throw StencilTooSmall("weno5_flux_derivative: grid too small");
  const Eigen::MatrixXd f = flux(state);
  Eigen::MatrixXd out(ncomp, n);
  const double inv_dx = 1.0 / grid.dx();
  for (int q = 0; q < ncomp; ++q) {
    const Eigen::VectorXd fplus = 0.5 * (f.row(q) + alpha * state.row(q)).transpose();
    const Eigen::VectorXd fminus = 0.5 * (f.row(q) - alpha * state.row(q)).transpose();
    const Eigen::VectorXd hplus = weno5_reconstruct_left(fplus);
    const Eigen::VectorXd hminus = weno5_reconstruct_right(fminus);
    for (int j = 0; j < n; ++j) {
      const double h_right = hplus(j) + hminus(j);
      const int jm = wrap(j - 1, n);
      const double h_left = hplus(jm) + hminus(jm);
      out(q, j) = -(h_right - h_left) * inv_dx;
    }
  }
  return out;
}

Eigen::VectorXd d4_second_derivative(const Grid1D& grid, const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size());
  if (n != grid.n) throw DimensionMismatch("d4_second_derivative: size mismatch");
  Eigen::VectorXd out(n);
  const double s = 1.0 / (grid.dx() * grid.dx());
  for (int j = 0; j < n; ++j) {
    out(j) = s * (-u(wrap(j - 2, n)) / 12.0 + 4.0 * u(wrap(j - 1, n)) / 3.0 - 2.5 * u(j) +
                  4.0 * u(wrap(j + 1, n)) / 3.0 - u(wrap(j + 2, n)) / 12.0);
  }
  return out;
}

SparseMatrix d4_matrix(const Grid1D& grid) {
  const int n = grid.n;
  const double s = 1.0 / (grid.dx() * grid.dx());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(5 * n);
  for (int j = 0; j < n; ++j) {
    trips.emplace_back(j, wrap(j - 2, n), -s / 12.0);
    trips.emplace_back(j, wrap(j - 1, n), 4.0 * s / 3.0);
    trips.emplace_back(j, j, -2.5 * s);
    trips.emplace_back(j, wrap(j + 1, n), 4.0 * s / 3.0);
    trips.emplace_back(j, wrap(j + 2, n), -s / 12.0);
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

}  // namespace indc
