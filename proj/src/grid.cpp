#include "scatkf/grid.hpp"

namespace scatkf {

namespace {

bool in_disk(const Eigen::Vector2d& p, const Eigen::Vector2d& c, double r) {
  return (p - c).squaredNorm() <= r * r;
}

} // namespace

MediumField phantom(const Grid& grid, PhantomKind kind) {
  Eigen::VectorXcd values = Eigen::VectorXcd::Zero(grid.cell_count());
  for (int m2 = -grid.M(); m2 < grid.M(); ++m2) {
    for (int m1 = -grid.M(); m1 < grid.M(); ++m1) {
      const Eigen::Vector2d p = grid.center(m1, m2);
      bool inside = false;
      if (kind == PhantomKind::disk) {
        inside = in_disk(p, {0.0, 0.0}, 1.0);
      } else {
        for (double a : {-1.5, 0.0, 1.5}) {
          for (double b : {-1.5, 0.0, 1.5}) {
            inside = inside || in_disk(p, {a, b}, 0.5);
          }
        }
      }
      if (inside) {
        values[grid.index(m1, m2)] = Complex(1.0, 0.0);
      }
    }
  }
  return MediumField(grid, std::move(values));
}

void require_same_grid(const MediumField& a, const MediumField& b,
                       const char* func) {
  if (a.grid != b.grid) {
    throw std::invalid_argument(std::string(func) + ": grids do not match");
  }
}

double mse(const MediumField& a, const MediumField& b) {
  require_same_grid(a, b, "mse");
  return (a.values - b.values).squaredNorm();
}

Complex inner_product_x(const MediumField& a, const MediumField& b) {
  require_same_grid(a, b, "inner_product_x");
  const double h = a.grid.h();
  return h * h * (a.values.adjoint() * b.values)(0, 0);
}

} // namespace scatkf
