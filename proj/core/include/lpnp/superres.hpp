#pragma once

#include <cstdint>
#include <vector>

#include "lpnp/image.hpp"

namespace lpnp {

/// Square blur kernel of odd side 2*radius+1, nonnegative, summing to one.
class BlurKernel {
 public:
  BlurKernel(int radius, std::vector<double> taps);

  int radius() const noexcept { return radius_; }
  int side() const noexcept { return 2 * radius_ + 1; }

  /// Tap at displacement (di, dj), |di|, |dj| <= radius.
  double operator()(int di, int dj) const noexcept {
    return taps_[static_cast<std::size_t>(di + radius_) * side() + (dj + radius_)];
  }
  const std::vector<double>& taps() const noexcept { return taps_; }

  /// True when h(i,j) == h(-i,j) == h(i,-j) exactly.
  bool is_symmetric() const noexcept;

 private:
  int radius_;
  std::vector<double> taps_;
};

/// Sampled isotropic Gaussian, normalized to unit sum.
BlurKernel gaussian_kernel(double sigma, int radius);

/// Identity blur.
BlurKernel delta_kernel();

enum class Boundary { Periodic, Symmetric };

/// A = downsample_k . blur, with samples kept at (k*i, k*j).
struct SuperResOp {
  BlurKernel blur;
  int factor = 1;
  Boundary boundary = Boundary::Periodic;
};

void validate(const SuperResOp& op);

/// Low-resolution image A x.
Image sr_apply(const SuperResOp& op, const Image& x);

/// A^T y: zero-fill upsampling followed by the same blur and boundary rule.
/// Requires a symmetric kernel.
Image sr_adjoint(const SuperResOp& op, const Image& y);

/// f(x) = 0.5 * |y - A x|^2
double sr_data_term(const SuperResOp& op, const Image& x, const Image& y);

/// grad f(x) = A^T (A x - y)
Image sr_gradient(const SuperResOp& op, const Image& x, const Image& y);

/// Largest eigenvalue of A^T A for high-resolution images of the given size,
/// estimated by power iteration from a seeded random start.
double power_iteration_lipschitz(const SuperResOp& op, int width, int height, int iters = 200,
                                 std::uint64_t seed = 0x5eed);

/// y = A x + noise_sigma * N(0, 1), deterministic per seed.
Image sr_simulate(const Image& x, const SuperResOp& op, double noise_sigma, std::uint64_t seed);

}  // namespace lpnp
