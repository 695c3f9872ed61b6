#include "indc/problems.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "indc/errors.hpp"

namespace indc {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TestProblem van_der_pol_problem(double eps) {
  if (eps < 0.0) throw OutOfRange("van_der_pol: eps must be nonnegative");
  TestProblem tp;
  tp.key = "vdp";
  SplitProblem& p = tp.problem;
  p.dim = 2;
  p.name = "van-der-pol";
  SplitProblem::Partition part;
  part.ny = 1;
  part.nz = 1;
  part.epsilon = eps;
  part.f = [](const Vector& /*y*/, const Vector& z) { return z; };
  part.g = [](const Vector& y, const Vector& z) {
    Vector out(1);
    out(0) = (1.0 - y(0) * y(0)) * z(0) - y(0);
    return out;
  };
  part.g_z = [](const Vector& y, const Vector& /*z*/) {
    Eigen::MatrixXd j(1, 1);
    j(0, 0) = 1.0 - y(0) * y(0);
    return j;
  };
  p.partition = part;
  tp.initial.resize(2);
  tp.initial(0) = 2.0;
  tp.initial(1) = -2.0 / 3.0 + (10.0 / 81.0) * eps - (292.0 / 2187.0) * eps * eps;
  return tp;
}

TestProblem relaxation_mol_problem(const Grid1D& grid, const RelaxationSystem& sys,
                                   const Vector& u0, const Vector& v0, const std::string& key) {
  if (sys.epsilon <= 0.0) throw OutOfRange(sys.name + ": eps must be positive");
  const int n = grid.n;
  if (u0.size() != n || v0.size() != n)
    throw DimensionMismatch(sys.name + ": initial data does not match the grid");

  // Construction checks: equilibrium consistency and the characteristic
  // speed bound, on samples over the declared u-range.
  for (int i = 0; i <= 16; ++i) {
    const double u =
        sys.sample_range.first + (sys.sample_range.second - sys.sample_range.first) * i / 16.0;
    const double q = sys.equilibrium(u);
    if (std::abs(sys.source(u, q)) > 1e-12 * (1.0 + std::abs(u)))
      throw Error(sys.name + ": g(u, q(u)) != 0 at a sampled state");
    // flux Jacobian [[df1/du, df1/dv], [df2/du, df2/dv]] by central differences
    const double d = 1e-6 * (1.0 + std::abs(u));
    const double a11 = (sys.flux_u(u + d, q) - sys.flux_u(u - d, q)) / (2 * d);
    const double a12 = (sys.flux_u(u, q + d) - sys.flux_u(u, q - d)) / (2 * d);
    const double a21 = (sys.flux_v(u + d, q) - sys.flux_v(u - d, q)) / (2 * d);
    const double a22 = (sys.flux_v(u, q + d) - sys.flux_v(u, q - d)) / (2 * d);
    Eigen::Matrix2d jac;
    jac << a11, a12, a21, a22;
    const double rho = jac.eigenvalues().cwiseAbs().maxCoeff();
    if (sys.char_speed(u, q) < rho - 1e-6)
      throw Error(sys.name + ": char_speed underestimates the flux Jacobian spectral radius");
  }

  TestProblem tp;
  tp.key = key;
  SplitProblem& p = tp.problem;
  p.dim = 2 * n;
  p.name = sys.name;
  const RelaxationSystem s = sys;
  const Grid1D g = grid;

  p.explicit_rhs = [s, g, n](const Vector& state) -> Vector {
    Eigen::MatrixXd comp(2, n);
    comp.row(0) = state.head(n).transpose();
    comp.row(1) = state.tail(n).transpose();
    double alpha = 0.0;
    for (int j = 0; j < n; ++j) alpha = std::max(alpha, s.char_speed(comp(0, j), comp(1, j)));
    auto flux = [&s](const Eigen::MatrixXd& st) {
      Eigen::MatrixXd f(2, st.cols());
      for (int j = 0; j < st.cols(); ++j) {
        f(0, j) = s.flux_u(st(0, j), st(1, j));
        f(1, j) = s.flux_v(st(0, j), st(1, j));
      }
      return f;
    };
    const Eigen::MatrixXd d = weno5_flux_derivative(g, comp, flux, alpha);
    Vector out(2 * n);
    out.head(n) = d.row(0).transpose();
    out.tail(n) = d.row(1).transpose();
    return out;
  };
  p.stiff_rhs = [s, n](const Vector& state) -> Vector {
    Vector out = Vector::Zero(2 * n);
    const double inv_eps = 1.0 / s.epsilon;
    for (int j = 0; j < n; ++j) out(n + j) = inv_eps * s.source(state(j), state(n + j));
    return out;
  };
  p.stiff_jacobian = [s, n](const Vector& state) -> SparseMatrix {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * n);
    const double inv_eps = 1.0 / s.epsilon;
    for (int j = 0; j < n; ++j) {
      trips.emplace_back(n + j, j, inv_eps * s.source_du(state(j), state(n + j)));
      trips.emplace_back(n + j, n + j, inv_eps * s.source_dv(state(j), state(n + j)));
    }
    SparseMatrix m(2 * n, 2 * n);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
  };
  p.jacobian_constant = s.source_linear;

  tp.initial.resize(2 * n);
  tp.initial.head(n) = u0;
  tp.initial.tail(n) = v0;
  return tp;
}

TestProblem burgers_problem(const Grid1D& grid, double reynolds) {
  if (reynolds <= 0.0) throw OutOfRange("burgers: R must be positive");
  const int n = grid.n;
  TestProblem tp;
  tp.key = "burgers";
  SplitProblem& p = tp.problem;
  p.dim = n;
  p.name = "burgers";
  const Grid1D g = grid;

  p.explicit_rhs = [g](const Vector& u) -> Vector {
    Eigen::MatrixXd comp(1, u.size());
    comp.row(0) = u.transpose();
    const double alpha = u.cwiseAbs().maxCoeff();
    auto flux = [](const Eigen::MatrixXd& st) {
      return (0.5 * st.array().square()).matrix().eval();
    };
    return weno5_flux_derivative(g, comp, flux, alpha).row(0).transpose();
  };
  const SparseMatrix diff = (1.0 / reynolds) * d4_matrix(grid);
  p.stiff_rhs = [diff](const Vector& u) -> Vector { return diff * u; };
  p.stiff_jacobian = [diff](const Vector&) -> SparseMatrix { return diff; };
  p.jacobian_constant = true;

  tp.initial.resize(n);
  for (int j = 0; j < n; ++j) tp.initial(j) = std::sin(kPi * grid.x(j));
  return tp;
}

Eigen::Matrix2cd linear_relaxation_mode_matrix(double xi, double b, double eps) {
  using namespace std::complex_literals;
  Eigen::Matrix2cd a;
  a(0, 0) = 0.0;
  a(0, 1) = -1i * xi;
  a(1, 0) = -1i * xi + b / eps;
  a(1, 1) = -1.0 / eps;
  return a;
}

Eigen::Vector2cd linear_relaxation_mode_initial(double xi, double b, double eps) {
  using namespace std::complex_literals;
  Eigen::Vector2cd v;
  v(0) = 1.0;
  v(1) = b + eps * (b * b - 1.0) * (1i * xi);
  return v;
}

Eigen::Matrix2cd expm2(const Eigen::Matrix2cd& a, double t) {
  using Cd = std::complex<double>;
  const Cd tr = a(0, 0) + a(1, 1);
  const Cd det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const Cd disc = std::sqrt(tr * tr - 4.0 * det);
  const Cd l1 = 0.5 * (tr + disc);
  const Cd l2 = 0.5 * (tr - disc);
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  if (std::abs(l1 - l2) < 1e-12 * (std::abs(l1) + std::abs(l2) + 1.0)) {
    // defective/near-defective pair: exp(lt)(I + t(A - lI))
    return std::exp(l1 * t) * (id + t * (a - l1 * id));
  }
  return (std::exp(l1 * t) / (l1 - l2)) * (a - l2 * id) +
         (std::exp(l2 * t) / (l2 - l1)) * (a - l1 * id);
}

TestProblem linear_relaxation_problem(const Grid1D& grid, double b, double eps) {
  if (std::abs(b) > 1.0)
    throw SubcharacteristicViolated("linear_relaxation: |b| > 1 violates the subcharacteristic condition");
  RelaxationSystem sys;
  sys.name = "linear-relaxation";
  sys.epsilon = eps;
  sys.flux_u = [](double /*u*/, double v) { return v; };
  sys.flux_v = [](double u, double /*v*/) { return u; };
  sys.source = [b](double u, double v) { return -(v - b * u); };
  sys.equilibrium = [b](double u) { return b * u; };
  sys.char_speed = [](double, double) { return 1.0; };
  sys.source_du = [b](double, double) { return b; };
  sys.source_dv = [](double, double) { return -1.0; };
  sys.source_linear = true;
  sys.sample_range = {-1.5, 1.5};

  const int n = grid.n;
  const double xi = 2.0 * kPi;
  Vector u0(n), v0(n);
  for (int j = 0; j < n; ++j) {
    const double x = grid.x(j);
    u0(j) = std::sin(xi * x);
    // v = b u + eps (b^2 - 1) d_x u, analytic derivative
    v0(j) = b * u0(j) + eps * (b * b - 1.0) * xi * std::cos(xi * x);
  }
  TestProblem tp = relaxation_mol_problem(grid, sys, u0, v0, "linrelax");

  const Grid1D g = grid;
  const Eigen::Matrix2cd a = linear_relaxation_mode_matrix(xi, b, eps);
  const Eigen::Vector2cd w0 = linear_relaxation_mode_initial(xi, b, eps);
  tp.problem.reference_solution = [g, a, w0, xi](double t) -> Vector {
    const Eigen::Vector2cd w = expm2(a, t) * w0;
    const int n = g.n;
    Vector out(2 * n);
    for (int j = 0; j < n; ++j) {
      const std::complex<double> phase = std::exp(std::complex<double>(0.0, xi * g.x(j)));
      out(j) = (w(0) * phase).imag();
      out(n + j) = (w(1) * phase).imag();
    }
    return out;
  };
  return tp;
}

TestProblem nonlinear_relaxation_problem(const Grid1D& grid, double eps) {
  RelaxationSystem sys;
  sys.name = "nonlinear-relaxation";
  sys.epsilon = eps;
  sys.flux_u = [](double /*h*/, double w) { return w; };
  sys.flux_v = [](double h, double /*w*/) { return h + 0.5 * h * h; };
  sys.source = [](double h, double w) { return -(w - 0.5 * h * h); };
  sys.equilibrium = [](double h) { return 0.5 * h * h; };
  sys.char_speed = [](double h, double) { return std::sqrt(1.0 + std::abs(h)); };
  sys.source_du = [](double h, double) { return h; };
  sys.source_dv = [](double, double) { return -1.0; };
  sys.source_linear = false;
  sys.sample_range = {0.8, 1.2};

  const int n = grid.n;
  Vector h0(n), w0(n);
  for (int j = 0; j < n; ++j) {
    const double x = grid.x(j);
    const double h = 1.0 + 0.2 * std::sin(8.0 * kPi * x);
    const double hx = 0.2 * 8.0 * kPi * std::cos(8.0 * kPi * x);
    // w = f(h) + eps (f'(h)^2 - p'(h)) h_x with f = h^2/2, p = h + h^2/2
    h0(j) = h;
    w0(j) = 0.5 * h * h + eps * (h * h - (1.0 + h)) * hx;
  }
  return relaxation_mol_problem(grid, sys, h0, w0, "nlrelax");
}

}  // namespace indc
