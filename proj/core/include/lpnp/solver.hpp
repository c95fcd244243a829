#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "lpnp/cg.hpp"
#include "lpnp/denoiser.hpp"
#include "lpnp/image.hpp"

namespace lpnp {

enum class DenoiserKind {
  Nlm,             ///< classic NLM, guide = denoiser input
  DsgNlmAdaptive,  ///< DSG-NLM re-weighted every iteration (A-DSG-NLM)
  DsgNlmFixed,     ///< DSG-NLM with the guide frozen at freeze_at (F-DSG-NLM)
  Identity,        ///< v = x + u
};

/// The plug-in regularization step v = D(x + u).
class Denoiser {
 public:
  virtual ~Denoiser() = default;

  /// `iteration` is the 1-based ADMM iteration being executed.
  virtual Image denoise(const Image& noisy, int iteration) = 0;
};

/// Builds the denoiser for a schedule. `freeze_at` is only read by
/// DsgNlmFixed; the guide adapts on iterations < freeze_at and is frozen on
/// the input of iteration freeze_at.
std::unique_ptr<Denoiser> make_denoiser(DenoiserKind kind, const PatchParams& p, int freeze_at);

struct SolverConfig {
  double rho = 1.0;     ///< ADMM penalty
  double lambda = 0.0;  ///< regularization weight; sigma = sqrt(lambda / rho)
  double alpha = 1.0;   ///< linearization coefficient, must exceed Lip(grad f)
  int max_iters = 250;
  std::optional<int> freeze_at = 15;
  ConstraintSet constraint = Box{0.0, 1.0};
  DenoiserKind denoiser = DenoiserKind::DsgNlmFixed;
  int patch_side = 5;
  int window_radius = 5;
  std::optional<double> bandwidth;  ///< overrides sqrt(lambda / rho)
  double cg_tol = 1e-6;             ///< standard ADMM baseline only
  int cg_max_iters = 200;           ///< standard ADMM baseline only
  double stop_tol = 0.0;            ///< stop when both residuals < stop_tol; 0 disables
};

/// Throws InvalidArgument on out-of-range fields.
void validate(const SolverConfig& cfg);

/// Denoiser bandwidth the configuration implies (0 means bypass).
double effective_bandwidth(const SolverConfig& cfg);

/// Data term and observation bundle handed to the solvers.
struct ProblemSpec {
  std::function<Image(const Image&)> gradient;
  std::function<double(const Image&)> objective;  ///< optional, logged when set
  Image initial;
  std::optional<Image> ground_truth;

  // Quadratic problems f = 0.5 |y - A x|^2 only; needed by the CG baseline.
  LinearOperator normal_operator;  ///< x -> A^T A x
  std::optional<Image> adjoint_observation;  ///< A^T y
};

struct IterationRecord {
  int iteration;
  double primal;
  double dual;
  double psnr;       ///< NaN without ground truth
  double time_ms;    ///< cumulative wall time since the solver started
  double objective;  ///< f(x^k), NaN when the problem has no objective
};

using IterationLog = std::vector<IterationRecord>;

struct SolveResult {
  Image v;  ///< denoised iterate, the restoration
  Image x;
  Image u;
  IterationLog log;
};

struct Residuals {
  double primal;  ///< |x - v|^2 / n
  double dual;    ///< |rho (v - v_prev)|^2 / n
};

Residuals residuals(const Image& x, const Image& v, const Image& v_prev, double rho);

/// Linearized plug-and-play ADMM:
///   x <- P_C((alpha x + rho (v - u) - grad f(x)) / (alpha + rho))
///   v <- D(x + u)
///   u <- u + x - v
/// starting from x = v = P_C(initial), u = 0. Throws DivergenceError when an
/// iterate stops being finite.
SolveResult linearized_pnp_admm(const ProblemSpec& prob, const SolverConfig& cfg,
                                Denoiser& denoiser);
SolveResult linearized_pnp_admm(const ProblemSpec& prob, const SolverConfig& cfg);

/// Standard plug-and-play ADMM for quadratic data terms: the x-update solves
/// (A^T A + rho I) x = A^T y + rho (v - u) with warm-started CG and ignores
/// the constraint; the returned v is projected onto C once at the end.
SolveResult standard_pnp_admm_cg(const ProblemSpec& prob, const SolverConfig& cfg,
                                 Denoiser& denoiser);
SolveResult standard_pnp_admm_cg(const ProblemSpec& prob, const SolverConfig& cfg);

}  // namespace lpnp
