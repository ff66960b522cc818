#include "memstep/operators.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "memstep/errors.hpp"

namespace memstep {

namespace {

void prepare_output(const GridFunction& in, GridFunction& out) {
  if (!(out.grid() == in.grid())) out = GridFunction(in.grid());
}

}  // namespace

GridFunction SpdOperator::operator()(const GridFunction& w) const {
  GridFunction out(w.grid());
  apply(w, out);
  return out;
}

void FivePointLaplacian::apply(const GridFunction& in, GridFunction& out) const {
  if (!(in.grid() == grid_)) throw DimensionError("Laplacian applied to a function on a different grid");
  prepare_output(in, out);
  const int m1 = grid_.interior_n1();
  const int m2 = grid_.interior_n2();
  const double c1 = 1.0 / (grid_.h1() * grid_.h1());
  const double c2 = 1.0 / (grid_.h2() * grid_.h2());
  const auto w = in.values();
  auto r = out.values();
  for (int j = 0; j < m2; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * m1;
    for (int i = 0; i < m1; ++i) {
      const std::size_t k = row + i;
      const double center = w[k];
      const double west = i > 0 ? w[k - 1] : 0.0;
      const double east = i + 1 < m1 ? w[k + 1] : 0.0;
      const double south = j > 0 ? w[k - m1] : 0.0;
      const double north = j + 1 < m2 ? w[k + m1] : 0.0;
      r[k] = c1 * (2.0 * center - west - east) + c2 * (2.0 * center - south - north);
    }
  }
}

GridFunction FivePointLaplacian::diagonal(const Grid2D& grid) const {
  GridFunction d(grid);
  d.fill(2.0 / (grid.h1() * grid.h1()) + 2.0 / (grid.h2() * grid.h2()));
  return d;
}

double FivePointLaplacian::smallest_eigenvalue() const {
  const auto mode = [](double h) {
    const double s = std::sin(std::numbers::pi * h / 2.0);
    return 4.0 * s * s / (h * h);
  };
  return mode(grid_.h1()) + mode(grid_.h2());
}

void Identity::apply(const GridFunction& in, GridFunction& out) const {
  prepare_output(in, out);
  const auto src = in.values();
  auto dst = out.values();
  std::copy(src.begin(), src.end(), dst.begin());
}

GridFunction Identity::diagonal(const Grid2D& grid) const {
  GridFunction d(grid);
  d.fill(1.0);
  return d;
}

DiagonalScaling::DiagonalScaling(GridFunction coefficients) : coefficients_(std::move(coefficients)) {
  for (double c : coefficients_.values()) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw ValidationError("diagonal scaling needs coefficients c(x) >= 0");
  }
}

DiagonalScaling::DiagonalScaling(const Grid2D& grid, double constant)
    : DiagonalScaling([&] {
        GridFunction c(grid);
        c.fill(constant);
        return c;
      }()) {}

void DiagonalScaling::apply(const GridFunction& in, GridFunction& out) const {
  require_same_grid(in, coefficients_);
  prepare_output(in, out);
  const auto c = coefficients_.values();
  const auto w = in.values();
  auto r = out.values();
  for (std::size_t k = 0; k < w.size(); ++k) r[k] = c[k] * w[k];
}

bool DiagonalScaling::positive_definite() const {
  for (double c : coefficients_.values())
    if (!(c > 0.0)) return false;
  return true;
}

GridFunction DiagonalScaling::diagonal(const Grid2D& grid) const {
  if (!(grid == coefficients_.grid())) throw DimensionError("diagonal requested on a different grid");
  return coefficients_;
}

ScaledSum::ScaledSum(std::vector<Term> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw ValidationError("scaled sum needs at least one term");
  for (const auto& [weight, op] : terms_) {
    if (!op) throw ValidationError("scaled sum term has no operator");
    if (!(weight >= 0.0) || !std::isfinite(weight)) throw ValidationError("scaled sum weights must be >= 0");
  }
}

void ScaledSum::apply(const GridFunction& in, GridFunction& out) const {
  terms_.front().second->apply(in, out);
  out *= terms_.front().first;
  GridFunction scratch(in.grid());
  for (std::size_t t = 1; t < terms_.size(); ++t) {
    terms_[t].second->apply(in, scratch);
    out.axpy(terms_[t].first, scratch);
  }
}

bool ScaledSum::positive_definite() const {
  for (const auto& [weight, op] : terms_)
    if (weight > 0.0 && op->positive_definite()) return true;
  return false;
}

GridFunction ScaledSum::diagonal(const Grid2D& grid) const {
  GridFunction d(grid);
  for (const auto& [weight, op] : terms_) d.axpy(weight, op->diagonal(grid));
  return d;
}

GridFunction apply_laplacian(const Grid2D& grid, const GridFunction& w) {
  if (!(w.grid() == grid)) throw DimensionError("grid function does not live on the requested grid");
  return FivePointLaplacian(grid)(w);
}

double a_norm(const SpdOperator& op, const GridFunction& w) {
  const double form = inner_product(op(w), w);
  const double ww = inner_product(w, w);
  if (form < -1e-12 * ww) {
    std::ostringstream msg;
    msg << op.name() << " is not positive semidefinite: (Lw, w) = " << form << " with (w, w) = " << ww;
    throw NotSpdError(msg.str());
  }
  return std::sqrt(std::max(form, 0.0));
}

bool is_identity(const SpdOperator* op) { return dynamic_cast<const Identity*>(op) != nullptr; }

}  // namespace memstep
