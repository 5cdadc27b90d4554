#ifndef SCATKF_FILTERS_HPP
#define SCATKF_FILTERS_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "scatkf/forward.hpp"
#include "scatkf/grid.hpp"

// Regularized inversion algorithms. All of them minimize, exactly or
// sequentially, the Tikhonov functional
//   alpha ||q - prior||_X^2 + sum_n ||A_n q - f_n||_{Y,R^{-1}}^2
// with <.,.>_X carrying weight w_x = h^2, <.,.>_Y carrying w_y = 2 pi / J,
// and R = r I. The Kalman recursion processes the n-sum one measurement at
// a time; with a single linearization per outer step the sweep reproduces
// the Levenberg-Marquardt iterate exactly, with per-measurement
// relinearization it becomes the extended Kalman filter.

namespace scatkf {

// Estimate plus the evolving weight operator B (the covariance role). B is
// kept dense, Hermitian (re-Hermitized after every update) and positive
// semidefinite up to roundoff.
struct FilterState {
  MediumField q;
  Eigen::MatrixXcd B;
  int outer = 0;  // i: completed outer linearizations before this state
  int inner = 0;  // n: measurements absorbed in the current sweep
};

enum class WeightPolicyMode {
  initialize,  // B_{i,0} = (1/alpha_i) I every outer step
  carry_over,  // B_{i,0} = B_{i-1,N}; only B_{0,0} uses 1/alpha_0
};

// Constant alpha_i = alpha, or Morozov discrepancy selection with factor
// rho in (0, 1).
struct RegularizationSchedule {
  enum class Mode { constant, morozov };
  Mode mode;
  double alpha = 0.0;
  double rho = 0.0;

  static RegularizationSchedule constant(double alpha);
  static RegularizationSchedule morozov(double rho);
};

// Far-field data u_inf for every incident direction, with the noise level
// and seed that produced it.
struct MeasurementSet {
  DirectionSet directions;
  std::vector<FarFieldData> data;
  double sigma = 0.0;
  unsigned long long seed = 0;
};

// ---------------------------------------------------------------------
// Vector-level core: plain matrices and explicit weights, usable without
// any grid (the linear-equivalence harness runs on raw random operators).
// ---------------------------------------------------------------------

// One Kalman measurement update. With the weighted adjoint
// A* = (w_y / (w_x r)) A^H the gain is
//   K = B A* (I + A B A*)^{-1},
// estimate += K (f - A estimate), B <- (I - K A) B re-Hermitized. The
// innovation matrix I + A B A* is the identity plus a PSD term, so
// singularity can only arise from an invalid (non-PSD) B; it is diagnosed
// and reported with the offending measurement index.
void kalman_update_core(Eigen::VectorXcd& estimate, Eigen::MatrixXcd& B,
                        const Eigen::MatrixXcd& A, const Eigen::VectorXcd& f,
                        double x_weight, double y_weight, double r,
                        int measurement_index);

// Exact minimizer of the full functional:
//   prior + (alpha I + w~ sum A^H A)^{-1} w~ sum A^H (f_n - A_n prior),
// w~ = w_y / (w_x r). Solved by Cholesky; alpha > 0 makes the normal
// matrix positive definite by construction.
Eigen::VectorXcd full_tikhonov_core(
    const Eigen::VectorXcd& prior, const std::vector<Eigen::MatrixXcd>& ops,
    const std::vector<Eigen::VectorXcd>& data, double alpha, double x_weight,
    double y_weight, double r);

// ---------------------------------------------------------------------
// Field-level wrappers.
// ---------------------------------------------------------------------

FilterState kalman_update(const FilterState& state, const LinearizedOperator& A,
                          const FarFieldData& f, double r);

MediumField full_tikhonov(const MediumField& prior,
                          const std::vector<LinearizedOperator>& ops,
                          const std::vector<FarFieldData>& data, double alpha,
                          double r);

// One Levenberg-Marquardt step: linearize every direction at q_i, fold the
// nonlinear residuals into effective linear data f_n = u_inf_n - F_n(q_i)
// + A_n q_i, and return the full-data Tikhonov minimizer around q_i.
MediumField flm_step(const MediumField& q_i, const FarFieldRowOperator& C,
                     const GreenMatrix& G, const MeasurementSet& measurements,
                     double alpha, double r);

// Kalman filter Levenberg-Marquardt sweep: one linearization at the
// incoming estimate, then N sequential Kalman updates on the effective
// linear data. The final estimate coincides with flm_step from the same
// point (sequential Tikhonov equivalence).
FilterState kfl_sweep(const FilterState& state_in,
                      const FarFieldRowOperator& C, const GreenMatrix& G,
                      const MeasurementSet& measurements, double r);

// Iterative extended Kalman filter sweep: relinearize at the current
// estimate before each measurement; innovation u_inf_n - F_n(q_{i,n-1}).
FilterState ekf_sweep(const FilterState& state_in,
                      const FarFieldRowOperator& C, const GreenMatrix& G,
                      const MeasurementSet& measurements, double r);

// Initial state for outer step i. initialize: B = (1/alpha_i) I.
// carry_over: B handed over from the previous sweep (first step falls back
// to initialize). The estimate is always carried; q_initial seeds step 0.
FilterState apply_weight_policy(const std::optional<FilterState>& prev,
                                const MediumField& q_initial, double alpha_i,
                                WeightPolicyMode policy);

// Morozov discrepancy selector: the alpha whose linearized residual norm
// equals rho times the current nonlinear residual norm, to 1e-3 relative,
// by bisection on log alpha in [1e-8, 1e12]. The residual is monotone
// nondecreasing in alpha, so the bracket is well defined whenever the
// lower end underestimates the target. Throws when the current residual is
// zero (nothing to select) or no bracket exists.
double morozov_alpha(const MediumField& q_i, const FarFieldRowOperator& C,
                     const GreenMatrix& G, const MeasurementSet& measurements,
                     double rho, double r);

} // namespace scatkf

#endif
