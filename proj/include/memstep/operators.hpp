#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "memstep/grid.hpp"

namespace memstep {

/// Symmetric positive (semi)definite linear map on grid functions.
///
/// Implementations are immutable; `apply` must be safe to call concurrently.
class SpdOperator {
 public:
  virtual ~SpdOperator() = default;

  /// out = L in; `in` and `out` must not alias. `out` is rebound to the grid of `in` when needed.
  virtual void apply(const GridFunction& in, GridFunction& out) const = 0;

  /// True when L >= delta I for some delta > 0 (not merely semidefinite).
  virtual bool positive_definite() const = 0;

  /// Diagonal of L on `grid`, used by the Jacobi preconditioner.
  virtual GridFunction diagonal(const Grid2D& grid) const = 0;

  virtual std::string name() const = 0;

  GridFunction operator()(const GridFunction& w) const;
};

using OperatorPtr = std::shared_ptr<const SpdOperator>;

/// Grid Laplacian -Delta_h on the five-point stencil with zero Dirichlet data.
class FivePointLaplacian final : public SpdOperator {
 public:
  explicit FivePointLaplacian(const Grid2D& grid) : grid_(grid) {}

  void apply(const GridFunction& in, GridFunction& out) const override;
  bool positive_definite() const override { return true; }
  GridFunction diagonal(const Grid2D& grid) const override;
  std::string name() const override { return "five-point Laplacian"; }

  const Grid2D& grid() const noexcept { return grid_; }

  /// Smallest eigenvalue 4 sin^2(pi h1/2)/h1^2 + 4 sin^2(pi h2/2)/h2^2.
  double smallest_eigenvalue() const;

 private:
  Grid2D grid_;
};

class Identity final : public SpdOperator {
 public:
  void apply(const GridFunction& in, GridFunction& out) const override;
  bool positive_definite() const override { return true; }
  GridFunction diagonal(const Grid2D& grid) const override;
  std::string name() const override { return "identity"; }
};

/// Pointwise multiplication by a coefficient field c(x) >= 0.
class DiagonalScaling final : public SpdOperator {
 public:
  /// Throws ValidationError if any coefficient is negative or not finite.
  explicit DiagonalScaling(GridFunction coefficients);
  DiagonalScaling(const Grid2D& grid, double constant);

  void apply(const GridFunction& in, GridFunction& out) const override;
  bool positive_definite() const override;
  GridFunction diagonal(const Grid2D& grid) const override;
  std::string name() const override { return "diagonal scaling"; }

  const GridFunction& coefficients() const noexcept { return coefficients_; }

 private:
  GridFunction coefficients_;
};

/// sum_k w_k L_k with w_k >= 0.
class ScaledSum final : public SpdOperator {
 public:
  using Term = std::pair<double, OperatorPtr>;

  /// Throws ValidationError on an empty list, a negative weight or a null operator.
  explicit ScaledSum(std::vector<Term> terms);

  void apply(const GridFunction& in, GridFunction& out) const override;
  bool positive_definite() const override;
  GridFunction diagonal(const Grid2D& grid) const override;
  std::string name() const override { return "scaled sum"; }

  const std::vector<Term>& terms() const noexcept { return terms_; }

 private:
  std::vector<Term> terms_;
};

/// Throws DimensionError if w does not live on `grid`.
GridFunction apply_laplacian(const Grid2D& grid, const GridFunction& w);

/// (L w, w)^{1/2}. Throws NotSpdError if the quadratic form is below -1e-12 (w, w).
double a_norm(const SpdOperator& op, const GridFunction& w);

/// True when `op` is an Identity instance.
bool is_identity(const SpdOperator* op);

}  // namespace memstep
