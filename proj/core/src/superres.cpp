#include "lpnp/superres.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "lpnp/error.hpp"
#include "lpnp/rng.hpp"

namespace lpnp {

namespace {

int extend_index(int i, int n, Boundary b) noexcept {
  if (b == Boundary::Symmetric) return reflect_index(i, n);
  int j = i % n;
  return j < 0 ? j + n : j;
}

/// Source image extended by `margin` on each side under the boundary rule.
std::vector<double> extend(const Image& x, int margin, Boundary b) {
  const int w = x.width() + 2 * margin;
  const int h = x.height() + 2 * margin;
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r) {
    const int sr = extend_index(r - margin, x.height(), b);
    for (int c = 0; c < w; ++c) {
      out[static_cast<std::size_t>(r) * w + c] = x(sr, extend_index(c - margin, x.width(), b));
    }
  }
  return out;
}

/// (h * x)(row*step, col*step) for every output sample of an out_w x out_h grid.
Image convolve_sampled(const Image& x, const BlurKernel& h, Boundary b, int step) {
  const int rad = h.radius();
  const std::vector<double> ext = extend(x, rad, b);
  const int ew = x.width() + 2 * rad;
  const int out_w = x.width() / step;
  const int out_h = x.height() / step;
  Image out(out_w, out_h);
  for (int i = 0; i < out_h; ++i) {
    for (int j = 0; j < out_w; ++j) {
      const int ci = i * step + rad;
      const int cj = j * step + rad;
      double acc = 0.0;
      for (int a = -rad; a <= rad; ++a) {
        const double* row = ext.data() + static_cast<std::size_t>(ci - a) * ew + cj;
        for (int c = -rad; c <= rad; ++c) acc += h(a, c) * row[-c];
      }
      out(i, j) = acc;
    }
  }
  return out;
}

void check_low_res(const SuperResOp& op, const Image& x) {
  if (x.width() % op.factor != 0 || x.height() % op.factor != 0) {
    throw DimensionMismatch("high-resolution size " + std::to_string(x.width()) + "x" +
                            std::to_string(x.height()) + " is not divisible by factor " +
                            std::to_string(op.factor));
  }
}

}  // namespace

BlurKernel::BlurKernel(int radius, std::vector<double> taps) : radius_(radius), taps_(std::move(taps)) {
  if (radius < 0) throw InvalidArgument("kernel radius must be non-negative");
  const std::size_t side = 2 * static_cast<std::size_t>(radius) + 1;
  if (taps_.size() != side * side) {
    throw InvalidArgument("kernel needs " + std::to_string(side * side) + " taps, got " +
                          std::to_string(taps_.size()));
  }
  double sum = 0.0;
  for (double t : taps_) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("kernel taps must be finite and >= 0");
    sum += t;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InvalidArgument("kernel taps must sum to 1 (sum is " + std::to_string(sum) + ")");
  }
}

bool BlurKernel::is_symmetric() const noexcept {
  for (int i = -radius_; i <= radius_; ++i) {
    for (int j = -radius_; j <= radius_; ++j) {
      if ((*this)(i, j) != (*this)(-i, j) || (*this)(i, j) != (*this)(i, -j)) return false;
    }
  }
  return true;
}

BlurKernel gaussian_kernel(double sigma, int radius) {
  if (!(sigma > 0.0)) throw InvalidArgument("blur sigma must be positive");
  if (radius < 1) throw InvalidArgument("blur radius must be >= 1");
  const int side = 2 * radius + 1;
  std::vector<double> taps(static_cast<std::size_t>(side) * side);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int i = -radius; i <= radius; ++i) {
    for (int j = -radius; j <= radius; ++j) {
      taps[static_cast<std::size_t>(i + radius) * side + (j + radius)] =
          std::exp(-static_cast<double>(i * i + j * j) * inv);
    }
  }
  const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
  for (double& t : taps) t /= sum;
  return BlurKernel(radius, std::move(taps));
}

BlurKernel delta_kernel() { return BlurKernel(0, {1.0}); }

void validate(const SuperResOp& op) {
  if (op.factor < 1) throw InvalidArgument("downsampling factor must be >= 1");
}

Image sr_apply(const SuperResOp& op, const Image& x) {
  validate(op);
  check_low_res(op, x);
  return convolve_sampled(x, op.blur, op.boundary, op.factor);
}

Image sr_adjoint(const SuperResOp& op, const Image& y) {
  validate(op);
  if (!op.blur.is_symmetric()) {
    throw InvalidArgument("the adjoint is implemented for symmetric blur kernels only");
  }
  const int k = op.factor;
  Image up(y.width() * k, y.height() * k);
  for (int i = 0; i < y.height(); ++i) {
    for (int j = 0; j < y.width(); ++j) up(i * k, j * k) = y(i, j);
  }
  return convolve_sampled(up, op.blur, op.boundary, 1);
}

double sr_data_term(const SuperResOp& op, const Image& x, const Image& y) {
  Image r = sr_apply(op, x);
  require_same_shape(r, y, "sr_data_term");
  r -= y;
  return 0.5 * squared_norm(r);
}

Image sr_gradient(const SuperResOp& op, const Image& x, const Image& y) {
  Image r = sr_apply(op, x);
  require_same_shape(r, y, "sr_gradient");
  r -= y;
  return sr_adjoint(op, r);
}

double power_iteration_lipschitz(const SuperResOp& op, int width, int height, int iters,
                                 std::uint64_t seed) {
  if (iters < 1) throw InvalidArgument("power iteration needs at least one iteration");
  Rng rng(seed);
  Image x(width, height);
  for (double& v : x.data()) v = rng.normal();
  x *= 1.0 / std::sqrt(squared_norm(x));
  double estimate = 0.0;
  for (int it = 0; it < iters; ++it) {
    Image y = sr_adjoint(op, sr_apply(op, x));
    estimate = dot(x, y);  // x has unit norm
    const double norm = std::sqrt(squared_norm(y));
    if (norm == 0.0) return 0.0;
    x = (1.0 / norm) * std::move(y);
  }
  return estimate;
}

Image sr_simulate(const Image& x, const SuperResOp& op, double noise_sigma, std::uint64_t seed) {
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");
  Image y = sr_apply(op, x);
  if (noise_sigma > 0.0) {
    Rng rng(seed);
    for (double& v : y.data()) v += noise_sigma * rng.normal();
  }
  return y;
}

}  // namespace lpnp
