#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace memstep {

/// Uniform grid on the unit square with n1 x n2 cells, h_a = 1 / n_a.
class Grid2D {
 public:
  /// Throws ValidationError unless both counts are >= 2.
  Grid2D(int n1, int n2);
  explicit Grid2D(int n) : Grid2D(n, n) {}

  int n1() const noexcept { return n1_; }
  int n2() const noexcept { return n2_; }
  double h1() const noexcept { return 1.0 / n1_; }
  double h2() const noexcept { return 1.0 / n2_; }
  double cell_area() const noexcept { return h1() * h2(); }

  /// Interior nodes per row (x1 direction) and rows (x2 direction).
  int interior_n1() const noexcept { return n1_ - 1; }
  int interior_n2() const noexcept { return n2_ - 1; }
  std::size_t interior_size() const noexcept {
    return static_cast<std::size_t>(n1_ - 1) * static_cast<std::size_t>(n2_ - 1);
  }

  bool operator==(const Grid2D&) const = default;

 private:
  int n1_;
  int n2_;
};

/// Values at the interior nodes of a Grid2D; boundary values are zero and not stored.
///
/// Storage is row-major with x1 varying fastest: node (i1, i2), 1 <= i_a <= N_a - 1,
/// lives at (i2 - 1) * (N1 - 1) + (i1 - 1).
class GridFunction {
 public:
  explicit GridFunction(const Grid2D& grid);
  /// Throws DimensionError if values.size() != grid.interior_size().
  GridFunction(const Grid2D& grid, std::vector<double> values);

  const Grid2D& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& at(int i1, int i2) { return values_[index(i1, i2)]; }
  double at(int i1, int i2) const { return values_[index(i1, i2)]; }
  std::size_t index(int i1, int i2) const noexcept {
    return static_cast<std::size_t>(i2 - 1) * static_cast<std::size_t>(grid_.interior_n1()) +
           static_cast<std::size_t>(i1 - 1);
  }

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double factor);
  /// this += factor * other
  GridFunction& axpy(double factor, const GridFunction& other);
  void fill(double value);

  bool operator==(const GridFunction&) const = default;

 private:
  Grid2D grid_;
  std::vector<double> values_;
};

GridFunction operator+(GridFunction lhs, const GridFunction& rhs);
GridFunction operator-(GridFunction lhs, const GridFunction& rhs);
GridFunction operator*(double factor, GridFunction w);

/// Throws DimensionError when the grids differ.
void require_same_grid(const GridFunction& a, const GridFunction& b);

/// (w, u) = sum_x w(x) u(x) h1 h2, accumulated sequentially in storage order.
double inner_product(const GridFunction& w, const GridFunction& u);
double l2_norm(const GridFunction& w);
double max_abs(const GridFunction& w);

using PointFunction = std::function<double(double x1, double x2)>;

/// f evaluated at the interior nodes x_a = i_a h_a.
GridFunction sample_function(const Grid2D& grid, const PointFunction& f);

/// Interior node closest to (0.5, 0.5); ties resolve to the lower index.
std::size_t center_index(const Grid2D& grid);

}  // namespace memstep
