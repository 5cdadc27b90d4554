#ifndef SCATKF_FFT_SOLVER_HPP
#define SCATKF_FFT_SOLVER_HPP

#include <Eigen/Dense>
#include <functional>
#include <mutex>
#include <vector>

#include "scatkf/forward.hpp"

// Optional fast path for the Lippmann-Schwinger solve: the Green matrix is
// block Toeplitz with Toeplitz blocks (entries depend on the center lag
// only), so G x is a 2-D convolution evaluated by circulant embedding and
// FFT, and (I - k^2 G diag(q)) u = rhs is solved matrix-free by GMRES.
// The dense factorization remains the default and the oracle; this path is
// validated against it to 1e-10.

namespace scatkf {

// y = G x via FFT convolution. Kernel values are lifted from the first row
// of the assembled dense matrix, so both paths share one quadrature.
class FftGreenConvolver {
 public:
  explicit FftGreenConvolver(const GreenMatrix& G);
  ~FftGreenConvolver();

  FftGreenConvolver(const FftGreenConvolver&) = delete;
  FftGreenConvolver& operator=(const FftGreenConvolver&) = delete;

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;

  int side() const { return side_; }

 private:
  int side_;       // grid cells per axis
  int padded_;     // circulant embedding size (2 * side)
  std::vector<Complex> kernel_hat_;  // FFT of the embedded kernel
  mutable std::mutex mutex_;         // FFTW buffers are shared per instance
  void* plan_forward_;
  void* plan_inverse_;
  void* buffer_;
};

// Unrestarted GMRES for a general complex operator. Returns the iterate
// meeting tol * ||rhs|| in the residual; throws std::runtime_error naming
// the iteration count when max_iterations is exhausted first.
Eigen::VectorXcd gmres(
    const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& op,
    const Eigen::VectorXcd& rhs, double tol, int max_iterations,
    int* iterations_out = nullptr);

// Matrix-free total-field solve: GMRES on u -> u - k^2 G (q .* u) with the
// convolver supplying G. Residual contract matches the dense path.
TotalField solve_total_field_fft(const GreenMatrix& G, const MediumField& q,
                                 const Eigen::Vector2d& theta,
                                 const FftGreenConvolver& conv);

} // namespace scatkf

#endif
