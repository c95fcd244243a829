#include "lpnp/cg.hpp"

#include <cmath>

#include "lpnp/error.hpp"

namespace lpnp {

CgResult cg_solve(const LinearOperator& apply, const Image& rhs, double tol, int max_iters,
                  const Image& x0) {
  if (!(tol > 0.0)) throw InvalidArgument("CG tolerance must be positive");
  if (max_iters < 1) throw InvalidArgument("CG needs at least one iteration");
  require_same_shape(rhs, x0, "cg_solve");

  const double rhs_norm = std::sqrt(squared_norm(rhs));
  if (rhs_norm == 0.0) return CgResult{Image(rhs.width(), rhs.height()), 0, 0.0, true};

  Image x = x0;
  Image r = rhs - apply(x);
  double rr = squared_norm(r);
  if (std::sqrt(rr) / rhs_norm <= tol) return CgResult{std::move(x), 0, std::sqrt(rr) / rhs_norm, true};

  Image p = r;
  int it = 0;
  while (it < max_iters) {
    ++it;
    const Image ap = apply(p);
    const double curvature = dot(p, ap);
    if (!(curvature > 0.0)) {
      if (!std::isfinite(curvature)) throw DivergenceError(it, "CG produced a non-finite iterate");
      throw Error("CG breakdown: nonpositive curvature, operator is not positive definite");
    }
    const double step = rr / curvature;
    auto xd = x.data();
    auto rd = r.data();
    const auto pd = p.data();
    const auto apd = ap.data();
    for (std::size_t i = 0; i < xd.size(); ++i) {
      xd[i] += step * pd[i];
      rd[i] -= step * apd[i];
    }
    const double rr_next = squared_norm(r);
    if (!std::isfinite(rr_next)) throw DivergenceError(it, "CG produced a non-finite iterate");
    const double rel = std::sqrt(rr_next) / rhs_norm;
    if (rel <= tol) return CgResult{std::move(x), it, rel, true};
    const double beta = rr_next / rr;
    rr = rr_next;
    auto pm = p.data();
    for (std::size_t i = 0; i < pm.size(); ++i) pm[i] = rd[i] + beta * pm[i];
  }
  return CgResult{std::move(x), it, std::sqrt(rr) / rhs_norm, false};
}

}  // namespace lpnp
