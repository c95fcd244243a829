#pragma once

#include <vector>

#include "lpnp/image.hpp"

namespace lpnp {

/// Geometry and bandwidth of the nonlocal weights.
struct PatchParams {
  int patch_side = 5;     ///< N_p, odd
  int window_radius = 5;  ///< N_s, search window is (2 N_s + 1)^2
  double bandwidth = 0.1; ///< sigma in exp(-|P_s - P_r|^2 / (2 N_p^2 sigma^2))

  int patch_half() const noexcept { return patch_side / 2; }
};

/// Throws InvalidArgument unless N_p is odd and >= 1, N_s >= 1, bandwidth > 0.
void validate(const PatchParams& p);

/// Displacement r - s between a pixel and a window neighbour.
struct Offset {
  int dy;
  int dx;
};

/// Gaussian patch-similarity kernel between pixels s and r of the guide.
/// Patches are read from the symmetrically extended guide, so any pair of
/// in-image pixels is valid. k(s,s) == 1.
double nlm_kernel(const Image& guide, Pixel s, Pixel r, const PatchParams& p);

/// Squared patch distance |P_s - P_{s+t}|^2 for every pixel s, via one
/// integral image of the squared-difference image; cost per pixel does not
/// depend on the patch size. Requires max(|dy|,|dx|) <= N_s.
Image patch_distance_map(const Image& guide, Offset t, const PatchParams& p);

/// Separable hat taper Lambda((s - r) / (N_s + 1)).
double hat_weight(Pixel s, Pixel r, int window_radius);

/// Classic nonlocal means: row-normalized kernel average over the window
/// (clipped at image borders). Weights come from `guide`.
Image nlm_denoise(const Image& input, const Image& guide, const PatchParams& p);

/// Doubly stochastic NLM: applies the symmetric, doubly stochastic matrix W
/// built from `guide` to `input` in three aggregation passes, without ever
/// materializing W.
Image dsg_nlm_denoise(const Image& input, const Image& guide, const PatchParams& p);

/// Same operator as dsg_nlm_denoise, but every patch distance is a direct
/// N_p x N_p loop. Reference for timing comparisons.
Image dsg_nlm_denoise_brute_force(const Image& input, const Image& guide, const PatchParams& p);

/// A guide snapshot: W is a deterministic function of the guide, so holding
/// the guide fixes the linear operator. The per-pixel normalizers (passes one
/// and two) are computed once at construction.
class FrozenGuide {
 public:
  FrozenGuide(Image guide, const PatchParams& params);

  const Image& guide() const noexcept { return guide_; }
  const PatchParams& params() const noexcept { return params_; }

  /// W * input; identical to dsg_nlm_denoise(input, guide(), params()).
  Image apply(const Image& input) const;

 private:
  Image guide_;
  PatchParams params_;
  std::vector<double> inv_sqrt_row_sums_;
  double inv_max_row_sum_;
};

FrozenGuide freeze_guide(const Image& guide, const PatchParams& p);

}  // namespace lpnp
