#pragma once

#include "memstep/grid.hpp"
#include "memstep/operators.hpp"

namespace memstep {

struct CgOptions {
  double tolerance = 1e-10;  // relative residual ||L x - b|| / ||b||
  int max_iterations = 0;    // 0 selects 10 (N1 + N2)
  bool jacobi = false;       // diagonal preconditioner, off by default
};

struct CgResult {
  GridFunction solution;
  int iterations = 0;
  double relative_residual = 0.0;  // recomputed from L x - b on return
};

/// Matrix-free conjugate gradients for an SPD operator, starting from zero.
///
/// The returned solution satisfies ||op x - rhs|| <= tol ||rhs|| with the
/// residual recomputed explicitly. Throws ConvergenceError (carrying the last
/// residual) when max_iterations is exhausted and NotSpdError when a search
/// direction has non-positive curvature.
CgResult cg_solve(const SpdOperator& op, const GridFunction& rhs, const CgOptions& options = {});

}  // namespace memstep
