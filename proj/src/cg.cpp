#include "memstep/cg.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "memstep/errors.hpp"

namespace memstep {

namespace {

// Unweighted dot product; the h1 h2 factor cancels in every ratio below.
double dot(const GridFunction& a, const GridFunction& b) {
  const auto x = a.values();
  const auto y = b.values();
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) sum += x[k] * y[k];
  return sum;
}

}  // namespace

CgResult cg_solve(const SpdOperator& op, const GridFunction& rhs, const CgOptions& options) {
  if (!(options.tolerance > 0.0)) throw ValidationError("CG tolerance must be > 0");
  const Grid2D& grid = rhs.grid();
  const int max_iter = options.max_iterations > 0 ? options.max_iterations : 10 * (grid.n1() + grid.n2());

  CgResult result{GridFunction(grid), 0, 0.0};
  const double rhs_norm = std::sqrt(dot(rhs, rhs));
  if (rhs_norm == 0.0) return result;
  const double target = options.tolerance * rhs_norm;

  std::optional<GridFunction> inv_diag;
  if (options.jacobi) {
    inv_diag = op.diagonal(grid);
    for (auto& d : inv_diag->values()) {
      if (!(d > 0.0)) throw NotSpdError(op.name() + " has a non-positive diagonal entry");
      d = 1.0 / d;
    }
  }
  const auto precondition = [&](const GridFunction& r, GridFunction& z) {
    if (!inv_diag) {
      z = r;
      return;
    }
    const auto rv = r.values();
    const auto dv = inv_diag->values();
    auto zv = z.values();
    for (std::size_t k = 0; k < rv.size(); ++k) zv[k] = dv[k] * rv[k];
  };

  GridFunction& x = result.solution;
  GridFunction r = rhs;
  GridFunction z(grid);
  GridFunction p(grid);
  GridFunction q(grid);
  double residual_norm = rhs_norm;

  // Outer loop restarts from the true residual whenever the recursive one
  // claims convergence but the explicit check disagrees.
  while (true) {
    precondition(r, z);
    p = z;
    double rz = dot(r, z);
    while (residual_norm > target) {
      if (result.iterations >= max_iter) {
        std::ostringstream msg;
        msg << "CG did not converge in " << max_iter << " iterations, relative residual "
            << residual_norm / rhs_norm;
        throw ConvergenceError(msg.str(), residual_norm / rhs_norm, result.iterations);
      }
      op.apply(p, q);
      const double curvature = dot(p, q);
      if (!(curvature > 0.0)) {
        std::ostringstream msg;
        msg << op.name() << " has non-positive curvature " << curvature << " at CG iteration "
            << result.iterations + 1;
        throw NotSpdError(msg.str());
      }
      const double alpha = rz / curvature;
      x.axpy(alpha, p);
      r.axpy(-alpha, q);
      ++result.iterations;
      residual_norm = std::sqrt(dot(r, r));
      if (residual_norm <= target) break;
      precondition(r, z);
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t k = 0; k < p.size(); ++k) p[k] = z[k] + beta * p[k];
    }
    op.apply(x, q);
    r = rhs;
    r -= q;
    residual_norm = std::sqrt(dot(r, r));
    if (residual_norm <= target) break;
  }
  result.relative_residual = residual_norm / rhs_norm;
  return result;
}

}  // namespace memstep
