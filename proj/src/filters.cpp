#include "scatkf/filters.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace scatkf {

RegularizationSchedule RegularizationSchedule::constant(double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument(
        "RegularizationSchedule: alpha must be positive");
  }
  return {Mode::constant, alpha, 0.0};
}

RegularizationSchedule RegularizationSchedule::morozov(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument(
        "RegularizationSchedule: rho must lie in (0, 1)");
  }
  return {Mode::morozov, 0.0, rho};
}

void kalman_update_core(Eigen::VectorXcd& estimate, Eigen::MatrixXcd& B,
                        const Eigen::MatrixXcd& A, const Eigen::VectorXcd& f,
                        double x_weight, double y_weight, double r,
                        int measurement_index) {
  const auto jdim = A.rows();
  if (A.cols() != estimate.size() || B.rows() != estimate.size() ||
      B.cols() != estimate.size() || f.size() != jdim) {
    throw std::invalid_argument("kalman_update: inconsistent shapes");
  }
  if (!(r > 0.0) || !(x_weight > 0.0) || !(y_weight > 0.0)) {
    throw std::domain_error("kalman_update: weights must be positive");
  }

  // A* = (w_y / (w_x r)) A^H; gain K = B A* (I + A B A*)^{-1}.
  const double w = y_weight / (x_weight * r);
  const Eigen::MatrixXcd BAstar = w * (B * A.adjoint());          // D x J
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Identity(jdim, jdim);
  S.noalias() += A * BAstar;                                      // J x J
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(S);
  if (!(lu.rcond() > 1e-14)) {
    throw std::runtime_error(
        "kalman_update: singular innovation matrix at measurement " +
        std::to_string(measurement_index));
  }
  // K = BAstar S^{-1} via S^H X = BAstar^H (S need not be Hermitian in
  // floating point).
  const Eigen::MatrixXcd K_adj = lu.adjoint().solve(BAstar.adjoint());
  const Eigen::MatrixXcd K = K_adj.adjoint();                     // D x J

  estimate.noalias() += K * (f - A * estimate);
  const Eigen::MatrixXcd AB = A * B;                              // J x D
  B.noalias() -= K * AB;
  const Eigen::MatrixXcd herm = 0.5 * (B + B.adjoint());
  B = herm;
}

Eigen::VectorXcd full_tikhonov_core(
    const Eigen::VectorXcd& prior, const std::vector<Eigen::MatrixXcd>& ops,
    const std::vector<Eigen::VectorXcd>& data, double alpha, double x_weight,
    double y_weight, double r) {
  if (ops.size() != data.size()) {
    throw std::invalid_argument("full_tikhonov: list lengths differ");
  }
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("full_tikhonov: alpha must be positive");
  }
  const auto d = prior.size();
  const double w = y_weight / (x_weight * r);

  Eigen::MatrixXcd normal = alpha * Eigen::MatrixXcd::Identity(d, d);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(d);
  for (size_t n = 0; n < ops.size(); ++n) {
    const Eigen::MatrixXcd& A = ops[n];
    if (A.cols() != d || data[n].size() != A.rows()) {
      throw std::invalid_argument("full_tikhonov: operator shape mismatch");
    }
    normal.noalias() += w * (A.adjoint() * A);
    rhs.noalias() += w * (A.adjoint() * (data[n] - A * prior));
  }
  const Eigen::LLT<Eigen::MatrixXcd> llt(normal);
  if (llt.info() != Eigen::Success) {
    // alpha > 0 makes the matrix positive definite; reaching this means a
    // broken operator list (non-finite entries).
    throw std::runtime_error("full_tikhonov: normal matrix not positive "
                             "definite despite alpha > 0");
  }
  return prior + llt.solve(rhs);
}

namespace {

void check_measurements(const MeasurementSet& m, const FarFieldRowOperator& C) {
  if (m.data.size() != static_cast<size_t>(m.directions.count())) {
    throw std::invalid_argument("MeasurementSet: data count != N");
  }
  for (const auto& f : m.data) {
    if (f.size() != C.entries.rows()) {
      throw std::invalid_argument("MeasurementSet: far-field length != J");
    }
  }
}

// Effective linear data folding the nonlinear residual at the
// linearization point: f_n = u_inf_n - F_n(q) + A_n q.
Eigen::VectorXcd effective_data(const FarFieldData& u_inf,
                                const FarFieldData& predicted,
                                const LinearizedOperator& A,
                                const Eigen::VectorXcd& q_values) {
  return u_inf - predicted + A.entries * q_values;
}

} // namespace

FilterState kalman_update(const FilterState& state,
                          const LinearizedOperator& A, const FarFieldData& f,
                          double r) {
  FilterState next = state;
  kalman_update_core(next.q.values, next.B, A.entries, f, A.x_weight(),
                     A.y_weight(), r, state.inner + 1);
  next.inner = state.inner + 1;
  return next;
}

MediumField full_tikhonov(const MediumField& prior,
                          const std::vector<LinearizedOperator>& ops,
                          const std::vector<FarFieldData>& data, double alpha,
                          double r) {
  std::vector<Eigen::MatrixXcd> entries;
  std::vector<Eigen::VectorXcd> rhs;
  entries.reserve(ops.size());
  rhs.reserve(ops.size());
  for (const auto& op : ops) {
    entries.push_back(op.entries);
  }
  for (const auto& f : data) {
    rhs.push_back(f);
  }
  if (ops.empty()) {
    throw std::invalid_argument("full_tikhonov: empty operator list");
  }
  return MediumField(
      prior.grid,
      full_tikhonov_core(prior.values, entries, rhs, alpha, ops[0].x_weight(),
                         ops[0].y_weight(), r));
}

MediumField flm_step(const MediumField& q_i, const FarFieldRowOperator& C,
                     const GreenMatrix& G, const MeasurementSet& measurements,
                     double alpha, double r) {
  check_measurements(measurements, C);
  const LinearizedForward fwd(C, G, q_i);
  const int n_count = measurements.directions.count();

  std::vector<Eigen::MatrixXcd> ops;
  std::vector<Eigen::VectorXcd> data;
  ops.reserve(n_count);
  data.reserve(n_count);
  double x_weight = 0.0, y_weight = 0.0;
  for (int n = 0; n < n_count; ++n) {
    const Eigen::Vector2d theta = measurements.directions.vector(n);
    const LinearizedOperator A = fwd.frechet(theta);
    const FarFieldData predicted = fwd.far_field(theta);
    ops.push_back(A.entries);
    data.push_back(
        effective_data(measurements.data[n], predicted, A, q_i.values));
    x_weight = A.x_weight();
    y_weight = A.y_weight();
  }
  return MediumField(q_i.grid,
                     full_tikhonov_core(q_i.values, ops, data, alpha, x_weight,
                                        y_weight, r));
}

FilterState kfl_sweep(const FilterState& state_in,
                      const FarFieldRowOperator& C, const GreenMatrix& G,
                      const MeasurementSet& measurements, double r) {
  check_measurements(measurements, C);
  std::optional<LinearizedForward> fwd_storage;
  try {
    fwd_storage.emplace(C, G, state_in.q);  // once, at q_{i,0}
  } catch (const std::exception& e) {
    throw std::runtime_error("kfl_sweep: outer " +
                             std::to_string(state_in.outer) +
                             ", linearization: " + e.what());
  }
  const LinearizedForward& fwd = *fwd_storage;
  const Eigen::VectorXcd q0 = state_in.q.values;
  const int n_count = measurements.directions.count();

  FilterState state = state_in;
  state.inner = 0;
  for (int n = 0; n < n_count; ++n) {
    const Eigen::Vector2d theta = measurements.directions.vector(n);
    try {
      const LinearizedOperator A = fwd.frechet(theta);
      const FarFieldData predicted = fwd.far_field(theta);
      const Eigen::VectorXcd f =
          effective_data(measurements.data[n], predicted, A, q0);
      state = kalman_update(state, A, f, r);
    } catch (const std::exception& e) {
      throw std::runtime_error("kfl_sweep: outer " +
                               std::to_string(state.outer) + ", measurement " +
                               std::to_string(n + 1) + ": " + e.what());
    }
  }
  return state;
}

FilterState ekf_sweep(const FilterState& state_in,
                      const FarFieldRowOperator& C, const GreenMatrix& G,
                      const MeasurementSet& measurements, double r) {
  check_measurements(measurements, C);
  const int n_count = measurements.directions.count();

  FilterState state = state_in;
  state.inner = 0;
  for (int n = 0; n < n_count; ++n) {
    const Eigen::Vector2d theta = measurements.directions.vector(n);
    try {
      // Relinearize at the current estimate for every measurement.
      const LinearizedForward fwd(C, G, state.q);
      const LinearizedOperator A = fwd.frechet(theta);
      const FarFieldData predicted = fwd.far_field(theta);
      const Eigen::VectorXcd f =
          effective_data(measurements.data[n], predicted, A, state.q.values);
      state = kalman_update(state, A, f, r);
    } catch (const std::exception& e) {
      throw std::runtime_error("ekf_sweep: outer " +
                               std::to_string(state.outer) + ", measurement " +
                               std::to_string(n + 1) + ": " + e.what());
    }
  }
  return state;
}

FilterState apply_weight_policy(const std::optional<FilterState>& prev,
                                const MediumField& q_initial, double alpha_i,
                                WeightPolicyMode policy) {
  const bool fresh = !prev.has_value();
  const MediumField& q = fresh ? q_initial : prev->q;
  const int d = q.grid.cell_count();
  const int outer = fresh ? 0 : prev->outer + 1;

  // carry_over still needs a first weight; step 0 initializes either way.
  if (policy == WeightPolicyMode::initialize || fresh) {
    if (!(alpha_i > 0.0)) {
      throw std::invalid_argument(
          "apply_weight_policy: alpha must be positive");
    }
    return {q, (1.0 / alpha_i) * Eigen::MatrixXcd::Identity(d, d), outer, 0};
  }
  return {q, prev->B, outer, 0};
}

double morozov_alpha(const MediumField& q_i, const FarFieldRowOperator& C,
                     const GreenMatrix& G, const MeasurementSet& measurements,
                     double rho, double r) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("morozov_alpha: rho must lie in (0, 1)");
  }
  check_measurements(measurements, C);
  const LinearizedForward fwd(C, G, q_i);
  const int n_count = measurements.directions.count();
  const auto d = q_i.values.size();

  // Residuals and operators at q_i; the stacked norms below use the plain
  // Euclidean norm, the constant (2 pi / J) / r factor cancels between the
  // two sides of the discrepancy equation.
  std::vector<Eigen::MatrixXcd> ops(n_count);
  std::vector<Eigen::VectorXcd> residuals(n_count);
  double w = 0.0;
  double residual_sq = 0.0;
  for (int n = 0; n < n_count; ++n) {
    const Eigen::Vector2d theta = measurements.directions.vector(n);
    const LinearizedOperator A = fwd.frechet(theta);
    ops[n] = A.entries;
    residuals[n] = measurements.data[n] - fwd.far_field(theta);
    residual_sq += residuals[n].squaredNorm();
    w = A.y_weight() / (A.x_weight() * r);
  }
  const double residual_norm = std::sqrt(residual_sq);
  if (residual_norm == 0.0) {
    throw std::runtime_error("morozov_alpha: residual is zero, nothing to "
                             "select (already converged)");
  }

  // Correction(alpha) = (alpha I + M)^{-1} b with Hermitian M; one
  // eigendecomposition serves every alpha probe.
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(d, d);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(d);
  for (int n = 0; n < n_count; ++n) {
    M.noalias() += w * (ops[n].adjoint() * ops[n]);
    b.noalias() += w * (ops[n].adjoint() * residuals[n]);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(M);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("morozov_alpha: eigendecomposition failed");
  }
  const Eigen::VectorXcd bt = eig.eigenvectors().adjoint() * b;

  auto linearized_residual = [&](double alpha) {
    const Eigen::ArrayXcd denom =
        (eig.eigenvalues().array() + alpha).cast<Complex>();
    const Eigen::VectorXcd correction =
        eig.eigenvectors() * (bt.array() / denom).matrix();
    double sq = 0.0;
    for (int n = 0; n < n_count; ++n) {
      sq += (residuals[n] - ops[n] * correction).squaredNorm();
    }
    return std::sqrt(sq);
  };

  const double target = rho * residual_norm;
  const double tol = 1e-3 * residual_norm;
  double lo = 1e-8, hi = 1e12;
  const double at_lo = linearized_residual(lo);
  const double at_hi = linearized_residual(hi);
  if (at_lo > target + tol || at_hi < target - tol) {
    throw std::runtime_error(
        "morozov_alpha: no bracket in [1e-8, 1e12] for rho " +
        std::to_string(rho));
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = std::sqrt(lo * hi);  // bisection on log alpha
    const double value = linearized_residual(mid);
    if (std::fabs(value - target) <= tol) {
      return mid;
    }
    (value < target ? lo : hi) = mid;
  }
  throw std::runtime_error("morozov_alpha: bisection did not converge");
}

} // namespace scatkf
