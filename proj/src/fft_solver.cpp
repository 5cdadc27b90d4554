#include "scatkf/fft_solver.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>

namespace scatkf {

namespace {

// FFTW plan creation is not thread safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

} // namespace

FftGreenConvolver::FftGreenConvolver(const GreenMatrix& G)
    : side_(G.grid.side()), padded_(2 * G.grid.side()) {
  const int p = padded_;
  const int n2 = p * p;

  std::lock_guard<std::mutex> lock(planner_mutex());
  buffer_ = fftw_malloc(sizeof(fftw_complex) * n2);
  auto* buf = static_cast<fftw_complex*>(buffer_);
  plan_forward_ = fftw_plan_dft_2d(p, p, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_inverse_ = fftw_plan_dft_2d(p, p, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);

  // Embedded kernel: K(l1, l2) with lags wrapped on the p-cycle, values
  // taken from row 0 of the dense matrix (cell 0 sits at (-M, -M), so row
  // 0 spans all nonnegative lags; negative lags mirror by |lag| symmetry).
  auto row0 = [&](int l1, int l2) {
    return G.entries(0, l2 * side_ + l1);
  };
  for (int l2 = 0; l2 < p; ++l2) {
    for (int l1 = 0; l1 < p; ++l1) {
      Complex value(0.0, 0.0);
      const int a1 = l1 <= side_ ? l1 : p - l1;  // |wrapped lag|
      const int a2 = l2 <= side_ ? l2 : p - l2;
      if (a1 < side_ && a2 < side_) {
        value = row0(a1, a2);
      }
      buf[l2 * p + l1][0] = value.real();
      buf[l2 * p + l1][1] = value.imag();
    }
  }
  fftw_execute(static_cast<fftw_plan>(plan_forward_));
  kernel_hat_.resize(n2);
  for (int i = 0; i < n2; ++i) {
    kernel_hat_[i] = Complex(buf[i][0], buf[i][1]);
  }
}

FftGreenConvolver::~FftGreenConvolver() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inverse_));
  fftw_free(buffer_);
}

Eigen::VectorXcd FftGreenConvolver::apply(const Eigen::VectorXcd& x) const {
  if (x.size() != side_ * side_) {
    throw std::invalid_argument("FftGreenConvolver: size mismatch");
  }
  const int p = padded_;
  std::lock_guard<std::mutex> lock(mutex_);
  auto* buf = static_cast<fftw_complex*>(buffer_);

  for (int i = 0; i < p * p; ++i) {
    buf[i][0] = 0.0;
    buf[i][1] = 0.0;
  }
  for (int m2 = 0; m2 < side_; ++m2) {
    for (int m1 = 0; m1 < side_; ++m1) {
      const Complex v = x[m2 * side_ + m1];
      buf[m2 * p + m1][0] = v.real();
      buf[m2 * p + m1][1] = v.imag();
    }
  }
  fftw_execute(static_cast<fftw_plan>(plan_forward_));
  const double scale = 1.0 / (p * p);
  for (int i = 0; i < p * p; ++i) {
    const Complex v = Complex(buf[i][0], buf[i][1]) * kernel_hat_[i] * scale;
    buf[i][0] = v.real();
    buf[i][1] = v.imag();
  }
  fftw_execute(static_cast<fftw_plan>(plan_inverse_));

  Eigen::VectorXcd y(side_ * side_);
  for (int m2 = 0; m2 < side_; ++m2) {
    for (int m1 = 0; m1 < side_; ++m1) {
      const auto& c = buf[m2 * p + m1];
      y[m2 * side_ + m1] = Complex(c[0], c[1]);
    }
  }
  return y;
}

Eigen::VectorXcd gmres(
    const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& op,
    const Eigen::VectorXcd& rhs, double tol, int max_iterations,
    int* iterations_out) {
  const int n = static_cast<int>(rhs.size());
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    if (iterations_out) *iterations_out = 0;
    return Eigen::VectorXcd::Zero(n);
  }

  const int m = std::min(max_iterations, n);
  std::vector<Eigen::VectorXcd> basis;
  basis.reserve(m + 1);
  basis.push_back(rhs / rhs_norm);  // start from x0 = 0

  Eigen::MatrixXcd hess = Eigen::MatrixXcd::Zero(m + 1, m);
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(m + 1);
  g[0] = rhs_norm;
  std::vector<Complex> cs(m), sn(m);

  int k = 0;
  bool converged = false;
  for (; k < m; ++k) {
    Eigen::VectorXcd w = op(basis[k]);
    for (int i = 0; i <= k; ++i) {  // modified Gram-Schmidt
      hess(i, k) = basis[i].dot(w);
      w -= hess(i, k) * basis[i];
    }
    const double hnext = w.norm();
    hess(k + 1, k) = hnext;

    for (int i = 0; i < k; ++i) {  // stored Givens rotations, rows <= k
      const Complex t = std::conj(cs[i]) * hess(i, k) +
                        std::conj(sn[i]) * hess(i + 1, k);
      hess(i + 1, k) = -sn[i] * hess(i, k) + cs[i] * hess(i + 1, k);
      hess(i, k) = t;
    }
    const double denom = std::sqrt(std::norm(hess(k, k)) +
                                   std::norm(hess(k + 1, k)));
    if (denom == 0.0) {
      throw std::runtime_error("gmres: breakdown at iteration " +
                               std::to_string(k));
    }
    cs[k] = hess(k, k) / denom;
    sn[k] = hess(k + 1, k) / denom;
    hess(k, k) = denom;
    hess(k + 1, k) = Complex(0.0, 0.0);
    g[k + 1] = -sn[k] * g[k];
    g[k] = std::conj(cs[k]) * g[k];

    if (std::abs(g[k + 1]) <= tol * rhs_norm) {
      converged = true;
      ++k;
      break;
    }
    if (hnext == 0.0) {  // invariant subspace; residual will not improve
      ++k;
      break;
    }
    basis.push_back(w / hnext);
  }

  if (!converged && std::abs(g[k]) > tol * rhs_norm) {
    throw std::runtime_error("gmres: no convergence within " +
                             std::to_string(k) + " iterations");
  }

  // Back substitution on the k x k triangular system.
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(k);
  for (int i = k - 1; i >= 0; --i) {
    Complex s = g[i];
    for (int j = i + 1; j < k; ++j) s -= hess(i, j) * y[j];
    y[i] = s / hess(i, i);
  }
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
  for (int i = 0; i < k; ++i) x += y[i] * basis[i];
  if (iterations_out) *iterations_out = k;
  return x;
}

TotalField solve_total_field_fft(const GreenMatrix& G, const MediumField& q,
                                 const Eigen::Vector2d& theta,
                                 const FftGreenConvolver& conv) {
  if (G.grid != q.grid) {
    throw std::invalid_argument("solve_total_field_fft: grids do not match");
  }
  const double k2 = G.k * G.k;
  const Eigen::VectorXcd uinc = incident_field(G.grid, G.k, theta);
  auto op = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
    return v - k2 * conv.apply(q.values.cwiseProduct(v));
  };
  int iters = 0;
  Eigen::VectorXcd u =
      gmres(op, uinc, 1e-12, G.grid.cell_count(), &iters);
  const Eigen::VectorXcd residual = op(u) - uinc;
  if (residual.norm() > 1e-10 * uinc.norm()) {
    throw std::runtime_error(
        "solve_total_field_fft: residual above 1e-10 after " +
        std::to_string(iters) + " iterations");
  }
  return {G.grid, theta, std::move(u)};
}

} // namespace scatkf
