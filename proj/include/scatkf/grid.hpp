#ifndef SCATKF_GRID_HPP
#define SCATKF_GRID_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

// Shared data model: the sampling grid on [-S,S]^2, piecewise-constant
// medium fields (the contrast q), phantoms, equispaced angle sets, and the
// discrete error metrics. Everything here is immutable after construction
// and safe to share across threads.

namespace scatkf {

using Complex = std::complex<double>;

// Square domain [-S,S]^2 split into (2M)^2 cells of width h = S/M.
// Cell centers: y_{m1,m2} = ((2 m1 + 1) S / (2M), (2 m2 + 1) S / (2M)) for
// m1, m2 in [-M, M-1]. Linear storage is row-major over (m1, m2) with m1
// fastest: index = (m2 + M) * 2M + (m1 + M). Serialized output follows the
// same order, so the layout is part of the file format.
class Grid {
 public:
  Grid(double half_width, int half_divisions)
      : S_(half_width), M_(half_divisions) {
    if (!(S_ > 0.0)) {
      throw std::invalid_argument("Grid: half width S must be positive");
    }
    if (M_ < 1) {
      throw std::invalid_argument("Grid: half divisions M must be >= 1");
    }
  }

  double S() const { return S_; }
  int M() const { return M_; }
  double h() const { return S_ / M_; }
  int side() const { return 2 * M_; }
  int cell_count() const { return 4 * M_ * M_; }

  // m1, m2 in [-M, M-1].
  int index(int m1, int m2) const {
    check_range(m1, "m1");
    check_range(m2, "m2");
    return (m2 + M_) * side() + (m1 + M_);
  }

  Eigen::Vector2d center(int m1, int m2) const {
    check_range(m1, "m1");
    check_range(m2, "m2");
    const double step = S_ / (2.0 * M_);
    return {(2.0 * m1 + 1.0) * step, (2.0 * m2 + 1.0) * step};
  }

  Eigen::Vector2d center_by_index(int c) const {
    if (c < 0 || c >= cell_count()) {
      throw std::invalid_argument("Grid: cell index out of range");
    }
    const int m1 = c % side() - M_;
    const int m2 = c / side() - M_;
    return center(m1, m2);
  }

  bool operator==(const Grid& other) const {
    return S_ == other.S_ && M_ == other.M_;
  }
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  void check_range(int m, const char* name) const {
    if (m < -M_ || m > M_ - 1) {
      throw std::invalid_argument(std::string("Grid: ") + name +
                                  " outside [-M, M-1]");
    }
  }

  double S_;
  int M_;
};

// Complex contrast coefficients, one per grid cell, in grid storage order.
struct MediumField {
  Grid grid;
  Eigen::VectorXcd values;

  MediumField(const Grid& g, Eigen::VectorXcd v)
      : grid(g), values(std::move(v)) {
    if (values.size() != grid.cell_count()) {
      throw std::invalid_argument(
          "MediumField: value count does not match grid");
    }
    if (!values.allFinite()) {
      throw std::invalid_argument("MediumField: non-finite entries");
    }
  }

  static MediumField zero(const Grid& g) {
    return MediumField(g, Eigen::VectorXcd::Zero(g.cell_count()));
  }
};

// One far-field sample per observation angle, for a single incident
// direction.
using FarFieldData = Eigen::VectorXcd;

namespace detail_ {

// n = 1..count equispaced angles 2 pi n / count; storage index i holds
// n = i + 1, so the last entry is the angle 2 pi, direction (1, 0).
class AngleSet {
 public:
  explicit AngleSet(int count) : count_(count) {
    if (count_ < 1) {
      throw std::invalid_argument("AngleSet: count must be >= 1");
    }
  }

  int count() const { return count_; }

  double angle(int i) const {
    check(i);
    return 2.0 * 3.14159265358979323846 * (i + 1) / count_;
  }

  Eigen::Vector2d vector(int i) const {
    const double a = angle(i);
    return {std::cos(a), std::sin(a)};
  }

  // Index of the antipodal direction (angle + pi), defined when count is
  // even; used by the reciprocity checks.
  int antipode(int i) const {
    check(i);
    if (count_ % 2 != 0) {
      throw std::invalid_argument("AngleSet: antipode needs even count");
    }
    return (i + count_ / 2) % count_;
  }

 private:
  void check(int i) const {
    if (i < 0 || i >= count_) {
      throw std::invalid_argument("AngleSet: index out of range");
    }
  }

  int count_;
};

} // namespace detail_

// Incident plane-wave directions theta_n.
class DirectionSet : public detail_::AngleSet {
 public:
  explicit DirectionSet(int n) : AngleSet(n) {}
};

// Far-field observation directions x_hat_j.
class ObservationSet : public detail_::AngleSet {
 public:
  explicit ObservationSet(int j) : AngleSet(j) {}
};

enum class PhantomKind { disk, nine_disks };

// Characteristic-function phantom sampled at cell centers: value 1 where
// the center lies in the body (closed disks), 0 elsewhere. disk: unit disk
// at the origin. nine_disks: radius 0.5 disks centered at (a, b) with
// a, b in {-1.5, 0, 1.5}.
MediumField phantom(const Grid& grid, PhantomKind kind);

// Sum over cells of |a_c - b_c|^2: the plain squared coefficient norm, no
// cell-area weight and no 1/D normalization.
double mse(const MediumField& a, const MediumField& b);

// h^2 sum over cells of conj(a_c) b_c: the discrete L^2(Q) pairing. The
// cell-area weight is what makes the discrete adjoints match the
// continuous ones.
Complex inner_product_x(const MediumField& a, const MediumField& b);

// Shared precondition for the binary field operations.
void require_same_grid(const MediumField& a, const MediumField& b,
                       const char* func);

} // namespace scatkf

#endif
