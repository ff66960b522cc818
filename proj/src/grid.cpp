#include "memstep/grid.hpp"

#include <cmath>
#include <sstream>

#include "memstep/errors.hpp"

namespace memstep {

Grid2D::Grid2D(int n1, int n2) : n1_(n1), n2_(n2) {
  if (n1 < 2 || n2 < 2) {
    std::ostringstream msg;
    msg << "grid needs at least 2 cells per direction, got " << n1 << " x " << n2;
    throw ValidationError(msg.str());
  }
}

GridFunction::GridFunction(const Grid2D& grid) : grid_(grid), values_(grid.interior_size(), 0.0) {}

GridFunction::GridFunction(const Grid2D& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.interior_size()) {
    std::ostringstream msg;
    msg << "grid function has " << values_.size() << " values, grid " << grid_.n1() << " x "
        << grid_.n2() << " needs " << grid_.interior_size();
    throw DimensionError(msg.str());
  }
}

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid() == b.grid())) {
    std::ostringstream msg;
    msg << "grid mismatch: " << a.grid().n1() << " x " << a.grid().n2() << " vs " << b.grid().n1() << " x "
        << b.grid().n2();
    throw DimensionError(msg.str());
  }
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

GridFunction& GridFunction::operator*=(double factor) {
  for (auto& v : values_) v *= factor;
  return *this;
}

GridFunction& GridFunction::axpy(double factor, const GridFunction& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += factor * other.values_[k];
  return *this;
}

void GridFunction::fill(double value) {
  for (auto& v : values_) v = value;
}

GridFunction operator+(GridFunction lhs, const GridFunction& rhs) { return lhs += rhs; }
GridFunction operator-(GridFunction lhs, const GridFunction& rhs) { return lhs -= rhs; }
GridFunction operator*(double factor, GridFunction w) { return w *= factor; }

double inner_product(const GridFunction& w, const GridFunction& u) {
  require_same_grid(w, u);
  const auto a = w.values();
  const auto b = u.values();
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return sum * w.grid().cell_area();
}

double l2_norm(const GridFunction& w) { return std::sqrt(inner_product(w, w)); }

double max_abs(const GridFunction& w) {
  double m = 0.0;
  for (double v : w.values()) m = std::max(m, std::abs(v));
  return m;
}

GridFunction sample_function(const Grid2D& grid, const PointFunction& f) {
  GridFunction w(grid);
  for (int i2 = 1; i2 < grid.n2(); ++i2) {
    const double x2 = i2 * grid.h2();
    for (int i1 = 1; i1 < grid.n1(); ++i1) w.at(i1, i2) = f(i1 * grid.h1(), x2);
  }
  return w;
}

std::size_t center_index(const Grid2D& grid) {
  // integer division picks the lower of two equidistant nodes for odd counts
  const int i1 = grid.n1() / 2;
  const int i2 = grid.n2() / 2;
  return static_cast<std::size_t>(i2 - 1) * static_cast<std::size_t>(grid.interior_n1()) +
         static_cast<std::size_t>(i1 - 1);
}

}  // namespace memstep
