#pragma once

#include <functional>

#include "lpnp/image.hpp"

namespace lpnp {

using LinearOperator = std::function<Image(const Image&)>;

struct CgResult {
  Image solution;
  int iterations;
  double relative_residual;  ///< |rhs - Op(x)| / |rhs|
  bool converged;            ///< false when max_iters ran out first
};

/// Conjugate gradients for a symmetric positive definite operator, started
/// from x0. Stops once the relative residual is <= tol. Throws
/// InvalidArgument for tol <= 0, Error on nonpositive curvature and
/// DivergenceError on non-finite iterates.
CgResult cg_solve(const LinearOperator& apply, const Image& rhs, double tol, int max_iters,
                  const Image& x0);

}  // namespace lpnp
