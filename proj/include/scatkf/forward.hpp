#ifndef SCATKF_FORWARD_HPP
#define SCATKF_FORWARD_HPP

#include <Eigen/Dense>
#include <Eigen/LU>

#include "scatkf/grid.hpp"

// Discretized Lippmann-Schwinger forward machinery: Nystrom discretization
// of the volume potential with kernel Phi(x, y) = (i/4) H0^(1)(k|x-y|),
// total-field solves, far-field evaluation, and Frechet-derivative assembly.
//
// Discrete model on a Grid with D cells of area h^2:
//   u = u_inc + k^2 G diag(q) u          (total field per direction)
//   far(q)    = C (q .* u_q)             (J observation angles)
// with G[i][j] ~ integral of Phi(y_i, .) over cell j and C the far-field
// row operator. All operators are dense; D stays desk-sized here.

namespace scatkf {

// G[i][j]: midpoint rule h^2 Phi(y_i, y_j) off the diagonal; the self cell
// integrates Phi exactly over the square cell (see assemble_green_matrix).
struct GreenMatrix {
  Grid grid;
  double k;
  Eigen::MatrixXcd entries;
};

// Total field u_q for one incident plane-wave direction.
struct TotalField {
  Grid grid;
  Eigen::Vector2d direction;
  Eigen::VectorXcd values;
};

// J x D rows mapping a cell-supported density to far-field samples:
// C[j][c] = (k^2 e^{i pi/4} / sqrt(8 pi k)) h^2 e^{-i k x_hat_j . y_c}.
struct FarFieldRowOperator {
  Grid grid;
  ObservationSet observations;
  double k;
  Eigen::MatrixXcd entries;
};

// Dense J x D discretization of the Frechet derivative F'_theta[q] at a
// linearization point, together with the inner-product weights that define
// its adjoint: x_weight = h^2 on the medium side, y_weight = 2 pi / J on
// the measurement side.
struct LinearizedOperator {
  MediumField q;
  Eigen::Vector2d direction;
  Eigen::MatrixXcd entries;

  double x_weight() const { return q.grid.h() * q.grid.h(); }
  double y_weight() const {
    return 2.0 * 3.14159265358979323846 / static_cast<double>(entries.rows());
  }
};

// Plane wave samples e^{i k y_c . theta} at the cell centers.
Eigen::VectorXcd incident_field(const Grid& grid, double k,
                                const Eigen::Vector2d& theta);

// Off-diagonal entries are one-point midpoint values h^2 Phi(y_i, y_j).
// The diagonal integrates Phi over the singular self cell exactly: with
// the antiderivative  int_0^w z H0^(1)(z) dz = w H1^(1)(w) + 2i/pi,  the
// square-cell integral reduces to a smooth 1-D integral over the polar
// angle, evaluated by fixed Gauss-Legendre quadrature to machine accuracy.
// Throws std::domain_error for k <= 0.
GreenMatrix assemble_green_matrix(const Grid& grid, double k);

FarFieldRowOperator assemble_far_field_rows(const Grid& grid,
                                            const ObservationSet& observations,
                                            double k);

// Dense LU of (I - k^2 G diag(q)), shared by every direction and every
// Frechet column at a linearization point. Refuses near-singular systems
// (reciprocal condition estimate below 1e-13).
class LsFactorization {
 public:
  LsFactorization(const GreenMatrix& G, const MediumField& q);

  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& rhs) const;
  double rcond() const { return rcond_; }

 private:
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  double rcond_;
};

// Solves (I - k^2 G diag(q)) u = u_inc and verifies the residual against
// 1e-10 ||u_inc||; throws std::runtime_error on violation. The overload
// taking a factorization is the shared-work path.
TotalField solve_total_field(const GreenMatrix& G, const MediumField& q,
                             const Eigen::Vector2d& theta);
TotalField solve_total_field(const GreenMatrix& G, const MediumField& q,
                             const Eigen::Vector2d& theta,
                             const LsFactorization& lu);

// far(q) at one direction: C (q .* u_q).
FarFieldData far_field(const FarFieldRowOperator& C, const GreenMatrix& G,
                       const MediumField& q, const Eigen::Vector2d& theta);

// Action of F'_theta[q] on a medium perturbation m: solve
//   v = (I - k^2 G diag(q))^{-1} k^2 G (m .* u_q)
// and return C (q .* v + m .* u_q).
FarFieldData frechet_apply(const FarFieldRowOperator& C, const GreenMatrix& G,
                           const MediumField& q, const MediumField& m,
                           const Eigen::Vector2d& theta);

// Dense J x D matrix of F'_theta[q], all D columns through one factorization:
//   A = C diag(u_q) + C diag(q) (I - k^2 G diag(q))^{-1} k^2 G diag(u_q).
LinearizedOperator assemble_frechet_matrix(const FarFieldRowOperator& C,
                                           const GreenMatrix& G,
                                           const MediumField& q,
                                           const Eigen::Vector2d& theta);

// Adjoint with respect to the weighted pairings <a,b>_X = h^2 sum conj(a) b
// and <f,g>_Y = (2 pi / J) sum conj(f) R^{-1} g with R = r I:
//   A* = (y_weight / x_weight) conj(A)^T / r.
// Throws std::domain_error for r <= 0.
Eigen::MatrixXcd weighted_adjoint(const LinearizedOperator& A, double r);

// Shared-factorization bundle for one linearization point q: the direction
// independent part T = C + C diag(q) (I - k^2 G diag(q))^{-1} k^2 G is
// computed once, so each direction costs one total-field solve plus a
// column scaling A_theta = T diag(u_q,theta).
class LinearizedForward {
 public:
  LinearizedForward(const FarFieldRowOperator& C, const GreenMatrix& G,
                    const MediumField& q);

  TotalField total_field(const Eigen::Vector2d& theta) const;
  FarFieldData far_field(const Eigen::Vector2d& theta) const;
  LinearizedOperator frechet(const Eigen::Vector2d& theta) const;
  const LsFactorization& factorization() const { return lu_; }
  const MediumField& point() const { return q_; }

 private:
  GreenMatrix G_;
  FarFieldRowOperator C_;
  MediumField q_;
  LsFactorization lu_;
  Eigen::MatrixXcd T_;
};

} // namespace scatkf

#endif
