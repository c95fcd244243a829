#include "lpnp/problems.hpp"

#include <algorithm>

namespace lpnp {

ProblemSpec make_superres_problem(const SuperResOp& op, const Image& y,
                                  std::optional<Image> ground_truth) {
  validate(op);
  const double k2 = static_cast<double>(op.factor) * op.factor;
  ProblemSpec prob{
      .gradient = [op, y](const Image& x) { return sr_gradient(op, x, y); },
      .objective = [op, y](const Image& x) { return sr_data_term(op, x, y); },
      .initial = k2 * sr_adjoint(op, y),
      .ground_truth = std::move(ground_truth),
      .normal_operator = [op](const Image& x) { return sr_adjoint(op, sr_apply(op, x)); },
      .adjoint_observation = sr_adjoint(op, y),
  };
  return prob;
}

ProblemSpec make_qis_problem(const QisCounts& counts, const QisModel& m,
                             std::optional<Image> ground_truth, double epsilon) {
  validate(counts, m);
  Image start = counts.ones;
  const double inv_k = 1.0 / m.oversampling;
  for (double& v : start.data()) v = std::clamp(v * inv_k, epsilon, 1.0);
  return ProblemSpec{
      .gradient = [counts, m, epsilon](const Image& x) { return qis_gradient(x, counts, m, epsilon); },
      .objective = [counts, m, epsilon](const Image& x) {
        return qis_data_term(x, counts, m, epsilon);
      },
      .initial = std::move(start),
      .ground_truth = std::move(ground_truth),
      .normal_operator = {},
      .adjoint_observation = std::nullopt,
  };
}

double default_superres_alpha(const SuperResOp& op, int width, int height) {
  return 1.05 * power_iteration_lipschitz(op, width, height);
}

double default_qis_alpha(const QisCounts& counts, const QisModel& m) {
  validate(counts, m);
  const double max_zeros = max_value(counts.zeros);
  return 2.0 * m.gain * max_zeros / m.oversampling;
}

}  // namespace lpnp
