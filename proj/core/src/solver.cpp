#include "lpnp/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "lpnp/error.hpp"

namespace lpnp {

namespace {

class IdentityDenoiser final : public Denoiser {
 public:
  Image denoise(const Image& noisy, int) override { return noisy; }
};

class NlmDenoiser final : public Denoiser {
 public:
  explicit NlmDenoiser(const PatchParams& p) : params_(p) { validate(p); }
  Image denoise(const Image& noisy, int) override { return nlm_denoise(noisy, noisy, params_); }

 private:
  PatchParams params_;
};

class AdaptiveDsgDenoiser final : public Denoiser {
 public:
  explicit AdaptiveDsgDenoiser(const PatchParams& p) : params_(p) { validate(p); }
  Image denoise(const Image& noisy, int) override { return dsg_nlm_denoise(noisy, noisy, params_); }

 private:
  PatchParams params_;
};

class FixedDsgDenoiser final : public Denoiser {
 public:
  FixedDsgDenoiser(const PatchParams& p, int freeze_at) : params_(p), freeze_at_(freeze_at) {
    validate(p);
    if (freeze_at < 1) throw InvalidArgument("freeze_at must be >= 1");
  }

  Image denoise(const Image& noisy, int iteration) override {
    if (!frozen_) {
      if (iteration < freeze_at_) return dsg_nlm_denoise(noisy, noisy, params_);
      frozen_.emplace(freeze_guide(noisy, params_));
    }
    return frozen_->apply(noisy);
  }

 private:
  PatchParams params_;
  int freeze_at_;
  std::optional<FrozenGuide> frozen_;
};

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::unique_ptr<Denoiser> denoiser_for(const SolverConfig& cfg) {
  validate(cfg);
  const double bw = effective_bandwidth(cfg);
  if (bw == 0.0) return std::make_unique<IdentityDenoiser>();
  PatchParams p{cfg.patch_side, cfg.window_radius, bw};
  return make_denoiser(cfg.denoiser, p, cfg.freeze_at.value_or(15));
}

void check_finite(const Image& img, const char* name, int iteration) {
  if (!all_finite(img)) {
    throw DivergenceError(iteration, std::string("iterate ") + name +
                                         " became non-finite at iteration " +
                                         std::to_string(iteration));
  }
}

/// Shared v/u updates, residuals and logging around a solver-specific x-update.
template <class XUpdate>
SolveResult run_admm(const ProblemSpec& prob, const SolverConfig& cfg, Denoiser& denoiser,
                     XUpdate&& x_update) {
  validate(cfg);
  if (prob.ground_truth) require_same_shape(prob.initial, *prob.ground_truth, "ground truth");
  const auto start = Clock::now();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  Image x = project(prob.initial, cfg.constraint);
  Image v = x;
  Image u(x.width(), x.height());
  IterationLog log;
  log.reserve(static_cast<std::size_t>(cfg.max_iters));

  for (int k = 1; k <= cfg.max_iters; ++k) {
    x_update(x, v, u, k);
    check_finite(x, "x", k);

    Image v_prev = std::move(v);
    v = denoiser.denoise(x + u, k);
    require_same_shape(v, x, "denoiser output");
    check_finite(v, "v", k);
    auto ud = u.data();
    const auto xd = x.data();
    const auto vd = v.data();
    for (std::size_t i = 0; i < ud.size(); ++i) ud[i] += xd[i] - vd[i];

    const Residuals res = residuals(x, v, v_prev, cfg.rho);
    log.push_back(IterationRecord{
        k, res.primal, res.dual, prob.ground_truth ? psnr(*prob.ground_truth, v) : nan,
        elapsed_ms(start), prob.objective ? prob.objective(x) : nan});
    if (cfg.stop_tol > 0.0 && res.primal < cfg.stop_tol && res.dual < cfg.stop_tol) break;
  }
  return SolveResult{std::move(v), std::move(x), std::move(u), std::move(log)};
}

}  // namespace

std::unique_ptr<Denoiser> make_denoiser(DenoiserKind kind, const PatchParams& p, int freeze_at) {
  switch (kind) {
    case DenoiserKind::Identity:
      return std::make_unique<IdentityDenoiser>();
    case DenoiserKind::Nlm:
      return std::make_unique<NlmDenoiser>(p);
    case DenoiserKind::DsgNlmAdaptive:
      return std::make_unique<AdaptiveDsgDenoiser>(p);
    case DenoiserKind::DsgNlmFixed:
      return std::make_unique<FixedDsgDenoiser>(p, freeze_at);
  }
  throw InvalidArgument("unknown denoiser kind");
}

void validate(const SolverConfig& cfg) {
  if (!(cfg.rho > 0.0) || !std::isfinite(cfg.rho)) throw InvalidArgument("rho must be positive");
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) throw InvalidArgument("lambda must be >= 0");
  if (!(cfg.alpha > 0.0) || !std::isfinite(cfg.alpha)) throw InvalidArgument("alpha must be positive");
  if (cfg.max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (cfg.freeze_at && *cfg.freeze_at < 1) throw InvalidArgument("freeze_at must be >= 1");
  if (cfg.bandwidth && !(*cfg.bandwidth > 0.0)) throw InvalidArgument("bandwidth must be positive");
  if (!(cfg.cg_tol > 0.0)) throw InvalidArgument("cg_tol must be positive");
  if (cfg.cg_max_iters < 1) throw InvalidArgument("cg_max_iters must be >= 1");
  if (!(cfg.stop_tol >= 0.0)) throw InvalidArgument("stop_tol must be >= 0");
  if (const auto* box = std::get_if<Box>(&cfg.constraint); box && !(box->lo < box->hi)) {
    throw InvalidArgument("box constraint requires lo < hi");
  }
  if (cfg.denoiser != DenoiserKind::Identity) {
    validate(PatchParams{cfg.patch_side, cfg.window_radius, 1.0});
  }
}

double effective_bandwidth(const SolverConfig& cfg) {
  return cfg.bandwidth ? *cfg.bandwidth : std::sqrt(cfg.lambda / cfg.rho);
}

Residuals residuals(const Image& x, const Image& v, const Image& v_prev, double rho) {
  require_same_shape(x, v, "residuals");
  require_same_shape(v, v_prev, "residuals");
  const auto xd = x.data();
  const auto vd = v.data();
  const auto pd = v_prev.data();
  double primal = 0.0;
  double dual = 0.0;
  for (std::size_t i = 0; i < xd.size(); ++i) {
    const double a = xd[i] - vd[i];
    const double b = rho * (vd[i] - pd[i]);
    primal += a * a;
    dual += b * b;
  }
  const double n = static_cast<double>(xd.size());
  return Residuals{primal / n, dual / n};
}

SolveResult linearized_pnp_admm(const ProblemSpec& prob, const SolverConfig& cfg,
                                Denoiser& denoiser) {
  if (!prob.gradient) throw InvalidArgument("problem has no gradient oracle");
  const double mu = 1.0 / (cfg.alpha + cfg.rho);
  return run_admm(prob, cfg, denoiser, [&](Image& x, const Image& v, const Image& u, int) {
    const Image grad = prob.gradient(x);
    require_same_shape(grad, x, "gradient");
    auto xd = x.data();
    const auto vd = v.data();
    const auto ud = u.data();
    const auto gd = grad.data();
    for (std::size_t i = 0; i < xd.size(); ++i) {
      xd[i] = mu * (cfg.alpha * xd[i] + cfg.rho * (vd[i] - ud[i]) - gd[i]);
    }
    x = project(x, cfg.constraint);
  });
}

SolveResult linearized_pnp_admm(const ProblemSpec& prob, const SolverConfig& cfg) {
  auto denoiser = denoiser_for(cfg);
  return linearized_pnp_admm(prob, cfg, *denoiser);
}

SolveResult standard_pnp_admm_cg(const ProblemSpec& prob, const SolverConfig& cfg,
                                 Denoiser& denoiser) {
  if (!prob.normal_operator || !prob.adjoint_observation) {
    throw InvalidArgument("the CG baseline needs a quadratic problem (A^T A and A^T y)");
  }
  require_same_shape(*prob.adjoint_observation, prob.initial, "A^T y");
  const LinearOperator system = [&](const Image& z) {
    Image out = prob.normal_operator(z);
    auto od = out.data();
    const auto zd = z.data();
    for (std::size_t i = 0; i < od.size(); ++i) od[i] += cfg.rho * zd[i];
    return out;
  };
  SolveResult result =
      run_admm(prob, cfg, denoiser, [&](Image& x, const Image& v, const Image& u, int) {
        Image rhs = *prob.adjoint_observation;
        auto rd = rhs.data();
        const auto vd = v.data();
        const auto ud = u.data();
        for (std::size_t i = 0; i < rd.size(); ++i) rd[i] += cfg.rho * (vd[i] - ud[i]);
        x = cg_solve(system, rhs, cfg.cg_tol, cfg.cg_max_iters, x).solution;
      });
  result.v = project(result.v, cfg.constraint);
  return result;
}

SolveResult standard_pnp_admm_cg(const ProblemSpec& prob, const SolverConfig& cfg) {
  auto denoiser = denoiser_for(cfg);
  return standard_pnp_admm_cg(prob, cfg, *denoiser);
}

}  // namespace lpnp
