#include "scatkf/forward.hpp"

#include <cmath>
#include <stdexcept>

#include "scatkf/specfun.hpp"

namespace scatkf {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kRcondFloor = 1e-13;

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

// Exact integral of Phi over the square self cell [-h/2, h/2]^2:
//   8 int_0^{pi/4} (i/(4 k^2)) [ w(phi) H1(w(phi)) + 2i/pi ] dphi,
//   w(phi) = k (h/2) / cos(phi).
// The integrand is analytic on [0, pi/4]; 32 Gauss-Legendre points leave
// only rounding-level error.
Complex self_cell_integral(double k, double h) {
  static const int kNodes = 32;
  std::vector<double> x, w;
  gauss_legendre(kNodes, x, w);
  Complex acc(0.0, 0.0);
  for (int i = 0; i < kNodes; ++i) {
    const double phi = (kPi / 8.0) * (x[i] + 1.0);
    const double arg = k * (h / 2.0) / std::cos(phi);
    const Complex inner =
        arg * specfun::hankel1_1(arg) + Complex(0.0, 2.0 / kPi);
    acc += w[i] * inner;
  }
  // Jacobian pi/8 from the node map times the leading 8, times i/(4 k^2).
  return Complex(0.0, 1.0) / (4.0 * k * k) * kPi * acc;
}

Complex phi_kernel(double k, double r) {
  const auto h0 = specfun::hankel1_0(k * r);
  return Complex(0.0, 0.25) * h0;
}

} // namespace

Eigen::VectorXcd incident_field(const Grid& grid, double k,
                                const Eigen::Vector2d& theta) {
  const int d = grid.cell_count();
  Eigen::VectorXcd u(d);
  for (int c = 0; c < d; ++c) {
    const double phase = k * grid.center_by_index(c).dot(theta);
    u[c] = std::polar(1.0, phase);
  }
  return u;
}

GreenMatrix assemble_green_matrix(const Grid& grid, double k) {
  if (!(k > 0.0)) {
    throw std::domain_error("assemble_green_matrix: requires k > 0");
  }
  const int d = grid.cell_count();
  const double h = grid.h();
  Eigen::MatrixXcd entries(d, d);
  const Complex diag = self_cell_integral(k, h);
  for (int i = 0; i < d; ++i) {
    entries(i, i) = diag;
    const Eigen::Vector2d yi = grid.center_by_index(i);
    for (int j = 0; j < i; ++j) {
      const double r = (yi - grid.center_by_index(j)).norm();
      const Complex g = h * h * phi_kernel(k, r);
      entries(i, j) = g;
      entries(j, i) = g;
    }
  }
  return {grid, k, std::move(entries)};
}

FarFieldRowOperator assemble_far_field_rows(const Grid& grid,
                                            const ObservationSet& observations,
                                            double k) {
  if (!(k > 0.0)) {
    throw std::domain_error("assemble_far_field_rows: requires k > 0");
  }
  const int d = grid.cell_count();
  const int j_count = observations.count();
  const double h = grid.h();
  const Complex front = k * k * std::polar(1.0, kPi / 4.0) /
                        std::sqrt(8.0 * kPi * k) * (h * h);
  Eigen::MatrixXcd entries(j_count, d);
  for (int j = 0; j < j_count; ++j) {
    const Eigen::Vector2d xhat = observations.vector(j);
    for (int c = 0; c < d; ++c) {
      const double phase = -k * xhat.dot(grid.center_by_index(c));
      entries(j, c) = front * std::polar(1.0, phase);
    }
  }
  return {grid, observations, k, std::move(entries)};
}

LsFactorization::LsFactorization(const GreenMatrix& G, const MediumField& q) {
  if (G.grid != q.grid) {
    throw std::invalid_argument("LsFactorization: grids do not match");
  }
  const int d = G.grid.cell_count();
  Eigen::MatrixXcd system = Eigen::MatrixXcd::Identity(d, d);
  const Eigen::MatrixXcd scaled = G.entries * q.values.asDiagonal();
  system.noalias() -= (G.k * G.k) * scaled;
  lu_.compute(system);
  rcond_ = lu_.rcond();
  if (!(rcond_ > kRcondFloor)) {
    throw std::runtime_error(
        "LsFactorization: system near singular, rcond estimate " +
        std::to_string(rcond_));
  }
}

Eigen::VectorXcd LsFactorization::solve(const Eigen::VectorXcd& rhs) const {
  return lu_.solve(rhs);
}

Eigen::MatrixXcd LsFactorization::solve(const Eigen::MatrixXcd& rhs) const {
  return lu_.solve(rhs);
}

namespace {

TotalField checked_total_field(const GreenMatrix& G, const MediumField& q,
                               const Eigen::Vector2d& theta,
                               const LsFactorization& lu) {
  const Eigen::VectorXcd uinc = incident_field(G.grid, G.k, theta);
  Eigen::VectorXcd u = lu.solve(uinc);
  // Defining-equation residual u - u_inc - k^2 G (q .* u).
  const Eigen::VectorXcd residual =
      u - uinc -
      (G.k * G.k) * (G.entries * q.values.cwiseProduct(u).eval());
  if (residual.norm() > 1e-10 * uinc.norm()) {
    throw std::runtime_error(
        "solve_total_field: residual above 1e-10 tolerance, rcond " +
        std::to_string(lu.rcond()));
  }
  return {G.grid, theta, std::move(u)};
}

} // namespace

TotalField solve_total_field(const GreenMatrix& G, const MediumField& q,
                             const Eigen::Vector2d& theta) {
  return checked_total_field(G, q, theta, LsFactorization(G, q));
}

TotalField solve_total_field(const GreenMatrix& G, const MediumField& q,
                             const Eigen::Vector2d& theta,
                             const LsFactorization& lu) {
  return checked_total_field(G, q, theta, lu);
}

FarFieldData far_field(const FarFieldRowOperator& C, const GreenMatrix& G,
                       const MediumField& q, const Eigen::Vector2d& theta) {
  if (C.grid != G.grid || C.k != G.k) {
    throw std::invalid_argument("far_field: operator/grid mismatch");
  }
  const TotalField u = solve_total_field(G, q, theta);
  return C.entries * q.values.cwiseProduct(u.values);
}

FarFieldData frechet_apply(const FarFieldRowOperator& C, const GreenMatrix& G,
                           const MediumField& q, const MediumField& m,
                           const Eigen::Vector2d& theta) {
  require_same_grid(q, m, "frechet_apply");
  const LsFactorization lu(G, q);
  const TotalField u = solve_total_field(G, q, theta, lu);
  const Eigen::VectorXcd mu = m.values.cwiseProduct(u.values);
  const Eigen::VectorXcd v =
      lu.solve(((G.k * G.k) * (G.entries * mu)).eval());
  return C.entries * (q.values.cwiseProduct(v) + mu);
}

LinearizedOperator assemble_frechet_matrix(const FarFieldRowOperator& C,
                                           const GreenMatrix& G,
                                           const MediumField& q,
                                           const Eigen::Vector2d& theta) {
  return LinearizedForward(C, G, q).frechet(theta);
}

Eigen::MatrixXcd weighted_adjoint(const LinearizedOperator& A, double r) {
  if (!(r > 0.0)) {
    throw std::domain_error("weighted_adjoint: requires r > 0");
  }
  return (A.y_weight() / A.x_weight() / r) * A.entries.adjoint();
}

LinearizedForward::LinearizedForward(const FarFieldRowOperator& C,
                                     const GreenMatrix& G,
                                     const MediumField& q)
    : G_(G), C_(C), q_(q), lu_(G, q) {
  if (C.grid != G.grid || C.k != G.k) {
    throw std::invalid_argument("LinearizedForward: operator/grid mismatch");
  }
  // T = C + C diag(q) (I - k^2 G diag(q))^{-1} k^2 G, shared by all
  // directions at this linearization point.
  const Eigen::MatrixXcd solved = lu_.solve(((G.k * G.k) * G.entries).eval());
  const Eigen::MatrixXcd cq = C_.entries * q_.values.asDiagonal();
  T_ = C_.entries;
  T_.noalias() += cq * solved;
}

TotalField LinearizedForward::total_field(const Eigen::Vector2d& theta) const {
  return solve_total_field(G_, q_, theta, lu_);
}

FarFieldData LinearizedForward::far_field(const Eigen::Vector2d& theta) const {
  const TotalField u = total_field(theta);
  return C_.entries * q_.values.cwiseProduct(u.values);
}

LinearizedOperator LinearizedForward::frechet(
    const Eigen::Vector2d& theta) const {
  const TotalField u = total_field(theta);
  return {q_, theta, T_ * u.values.asDiagonal()};
}

} // namespace scatkf
