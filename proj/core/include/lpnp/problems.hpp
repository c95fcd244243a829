#pragma once

#include <optional>

#include "lpnp/qis.hpp"
#include "lpnp/solver.hpp"
#include "lpnp/superres.hpp"

namespace lpnp {

/// f(x) = 0.5 |y - A x|^2. The start is k^2 A^T y: zero-fill upsampling
/// smoothed by the blur, rescaled so a constant image keeps its level.
ProblemSpec make_superres_problem(const SuperResOp& op, const Image& y,
                                  std::optional<Image> ground_truth = std::nullopt);

/// Single-photon negative log-likelihood. The start is K1/K clamped to
/// [epsilon, 1].
ProblemSpec make_qis_problem(const QisCounts& counts, const QisModel& m,
                             std::optional<Image> ground_truth = std::nullopt,
                             double epsilon = kQisEpsilon);

/// 1.05 * lambda_max(A^T A) for high-resolution images of the given size.
double default_superres_alpha(const SuperResOp& op, int width, int height);

/// 2 * eta * max_i(K0_i) / K.
double default_qis_alpha(const QisCounts& counts, const QisModel& m);

}  // namespace lpnp
