#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <vector>

#include "criteria.hpp"
#include "scatkf/fft_solver.hpp"
#include "scatkf/forward.hpp"

using namespace scatkf;

namespace {

std::string fmt1(const char* fmt, double a) {
  char buf[200];
  std::snprintf(buf, sizeof(buf), fmt, a);
  return buf;
}

MediumField random_field(const Grid& grid, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXcd v(grid.cell_count());
  for (int c = 0; c < grid.cell_count(); ++c) v[c] = Complex(u(rng), u(rng));
  return MediumField(grid, std::move(v));
}

} // namespace

std::string criterion2_forward_solver() {
  const Grid grid(3.0, 6);
  const double k = 7.0;
  const GreenMatrix G = assemble_green_matrix(grid, k);
  const FarFieldRowOperator C =
      assemble_far_field_rows(grid, ObservationSet(60), k);
  const DirectionSet directions(60);

  // (a) Vanishing contrast: the integral equation collapses to the
  // identity, so the total field must come back exactly equal to the
  // incident field and the far field exactly zero.
  const MediumField q_zero = MediumField::zero(grid);
  for (int n : {0, 17, 59}) {
    const Eigen::Vector2d theta = directions.vector(n);
    const TotalField u = solve_total_field(G, q_zero, theta);
    const Eigen::VectorXcd uinc = incident_field(grid, k, theta);
    if ((u.values - uinc).norm() != 0.0) {
      return "q=0 total field differs from the incident field";
    }
    if (far_field(C, G, q_zero, theta).norm() != 0.0) {
      return "q=0 far field is not exactly zero";
    }
  }

  // (b) Dense LU vs FFT-accelerated solve on the disk phantom.
  const MediumField q_disk = phantom(grid, PhantomKind::disk);
  const FftGreenConvolver conv(G);
  double worst_fft = 0.0;
  for (int n : {0, 23}) {
    const Eigen::Vector2d theta = directions.vector(n);
    const TotalField dense = solve_total_field(G, q_disk, theta);
    const TotalField fft = solve_total_field_fft(G, q_disk, theta, conv);
    worst_fft = std::max(worst_fft, (dense.values - fft.values).norm() /
                                        dense.values.norm());
  }
  if (worst_fft > 1e-10) {
    return fmt1("dense vs fft rel dev %.3e exceeds 1e-10", worst_fft);
  }

  // (c) Reciprocity on matched angle sets: swapping observation and
  // incidence while flipping both directions preserves the far field.
  // Holds exactly for this discretization because the kernel matrix is
  // symmetric, so any visible deviation is an assembly bug.
  const LinearizedForward fwd(C, G, q_disk);
  Eigen::MatrixXcd U(60, 60);
  for (int n = 0; n < 60; ++n) {
    U.col(n) = fwd.far_field(directions.vector(n));
  }
  const double scale = U.cwiseAbs().maxCoeff();
  double worst_rec = 0.0;
  for (int n = 0; n < 60; ++n) {
    for (int j = 0; j < 60; ++j) {
      const double dev = std::abs(
          U(j, n) - U(directions.antipode(n), directions.antipode(j)));
      worst_rec = std::max(worst_rec, dev / scale);
    }
  }
  if (worst_rec > 1e-6) {
    return fmt1("reciprocity rel dev %.3e exceeds 1e-6", worst_rec);
  }
  return {};
}

std::string criterion3_frechet_slope() {
  const Grid grid(3.0, 6);
  const double k = 7.0;
  const GreenMatrix G = assemble_green_matrix(grid, k);
  const FarFieldRowOperator C =
      assemble_far_field_rows(grid, ObservationSet(60), k);
  const Eigen::Vector2d theta = DirectionSet(60).vector(0);
  const std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4};

  const MediumField points[2] = {MediumField::zero(grid),
                                 phantom(grid, PhantomKind::disk)};
  for (const MediumField& q : points) {
    const FarFieldData base = far_field(C, G, q, theta);
    for (unsigned trial = 0; trial < 5; ++trial) {
      const MediumField m = random_field(grid, 7000 + trial);
      const FarFieldData derivative = frechet_apply(C, G, q, m, theta);

      // Linearization error err(eps) = |F(q + eps m) - F(q) - eps F'[q]m|
      // must shrink quadratically; fit the log-log slope by least squares.
      double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
      for (double e : eps) {
        const MediumField shifted(grid, (q.values + e * m.values).eval());
        const double err =
            (far_field(C, G, shifted, theta) - base - e * derivative).norm();
        const double lx = std::log(e), ly = std::log(err);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
      }
      const double n = static_cast<double>(eps.size());
      const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      if (slope < 1.8 || slope > 2.2) {
        return fmt1("log-log slope %.3f outside 2.0 +/- 0.2", slope);
      }
    }
  }
  return {};
}
