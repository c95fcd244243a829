#include "lpnp/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <span>
#include <string>
#include <vector>

#include "lpnp/error.hpp"
#include "lpnp/integral_image.hpp"

namespace lpnp {

namespace {

constexpr double kNormalizerFloor = 1e-300;

/// Guide extended by half-sample reflection on every side.
class PaddedGuide {
 public:
  PaddedGuide(const Image& guide, int margin)
      : margin_(margin), stride_(guide.width() + 2 * margin), data_() {
    const int rows = guide.height() + 2 * margin;
    data_.resize(static_cast<std::size_t>(rows) * stride_);
    for (int r = 0; r < rows; ++r) {
      const int src_r = reflect_index(r - margin, guide.height());
      for (int c = 0; c < stride_; ++c) {
        data_[static_cast<std::size_t>(r) * stride_ + c] =
            guide(src_r, reflect_index(c - margin, guide.width()));
      }
    }
  }

  /// Row pointer in image coordinates; row may be negative down to -margin.
  const double* row(int r) const noexcept {
    return data_.data() + static_cast<std::size_t>(r + margin_) * stride_ + margin_;
  }

 private:
  int margin_;
  int stride_;
  std::vector<double> data_;
};

/// Pixels s for which s and s + t both lie in the image.
struct Region {
  int r0, r1, c0, c1;

  int rows() const noexcept { return r1 - r0; }
  int cols() const noexcept { return c1 - c0; }
  bool empty() const noexcept { return r1 <= r0 || c1 <= c0; }
};

Region overlap(int width, int height, Offset t) {
  return Region{std::max(0, -t.dy), std::min(height, height - t.dy), std::max(0, -t.dx),
                std::min(width, width - t.dx)};
}

/// Patch distances through a summed-area table of the squared-difference image.
class IntegralDistances {
 public:
  IntegralDistances(const PaddedGuide& guide, int patch_side)
      : guide_(guide), side_(patch_side), half_(patch_side / 2) {}

  void operator()(Offset t, const Region& reg, std::span<double> out) {
    const int rows = reg.rows() + 2 * half_;
    const int cols = reg.cols() + 2 * half_;
    diff_.resize(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
      const int gr = reg.r0 - half_ + i;
      const double* a = guide_.row(gr) + (reg.c0 - half_);
      const double* b = guide_.row(gr + t.dy) + (reg.c0 - half_ + t.dx);
      double* d = diff_.data() + static_cast<std::size_t>(i) * cols;
      for (int j = 0; j < cols; ++j) {
        const double e = a[j] - b[j];
        d[j] = e * e;
      }
    }
    table_.assign(diff_, cols, rows);
    std::size_t k = 0;
    for (int i = 0; i < reg.rows(); ++i) {
      for (int j = 0; j < reg.cols(); ++j) out[k++] = table_.box_sum_unchecked(i, j, side_);
    }
  }

 private:
  const PaddedGuide& guide_;
  int side_;
  int half_;
  std::vector<double> diff_;
  IntegralImage table_;
};

/// Patch distances by direct N_p x N_p summation.
class DirectDistances {
 public:
  DirectDistances(const PaddedGuide& guide, int patch_side)
      : guide_(guide), half_(patch_side / 2) {}

  void operator()(Offset t, const Region& reg, std::span<double> out) const {
    std::size_t k = 0;
    for (int row = reg.r0; row < reg.r1; ++row) {
      for (int col = reg.c0; col < reg.c1; ++col) {
        double ssd = 0.0;
        for (int a = -half_; a <= half_; ++a) {
          const double* p = guide_.row(row + a) + col;
          const double* q = guide_.row(row + a + t.dy) + col + t.dx;
          for (int b = -half_; b <= half_; ++b) {
            const double e = p[b] - q[b];
            ssd += e * e;
          }
        }
        out[k++] = ssd;
      }
    }
  }

 private:
  const PaddedGuide& guide_;
  int half_;
};

double kernel_scale(const PatchParams& p) {
  const double np2 = static_cast<double>(p.patch_side) * p.patch_side;
  return 1.0 / (2.0 * np2 * p.bandwidth * p.bandwidth);
}

/// Visits every unordered window pair {s, s+t}, t != 0, once: offsets with
/// dy > 0, or dy == 0 and dx > 0, in raster order; pixels in raster order.
/// `visit(s, r, taper * kernel)` receives flat indices.
template <class Distances, class Visit>
void for_each_window_pair(int width, int height, const PatchParams& p, Distances& distances,
                          bool tapered, Visit&& visit) {
  const int ns = p.window_radius;
  const double scale = kernel_scale(p);
  const double inv_ns1 = 1.0 / (ns + 1);
  std::vector<double> dist;
  for (int dy = 0; dy <= ns; ++dy) {
    for (int dx = -ns; dx <= ns; ++dx) {
      if (dy == 0 && dx <= 0) continue;
      const Offset t{dy, dx};
      const Region reg = overlap(width, height, t);
      if (reg.empty()) continue;
      dist.resize(static_cast<std::size_t>(reg.rows()) * reg.cols());
      distances(t, reg, dist);
      const double taper =
          tapered ? (1.0 - std::abs(dy) * inv_ns1) * (1.0 - std::abs(dx) * inv_ns1) : 1.0;
      std::size_t k = 0;
      for (int row = reg.r0; row < reg.r1; ++row) {
        const std::size_t s0 = static_cast<std::size_t>(row) * width;
        const std::size_t r0 = static_cast<std::size_t>(row + dy) * width + dx;
        for (int col = reg.c0; col < reg.c1; ++col, ++k) {
          visit(s0 + col, r0 + col, taper * std::exp(-dist[k] * scale));
        }
      }
    }
  }
}

struct Normalizers {
  std::vector<double> inv_sqrt_row_sums;  // (g_s)^{-1/2}
  double inv_max_row_sum;                 // 1/m
};

template <class Distances>
Normalizers compute_normalizers(int width, int height, const PatchParams& p,
                                Distances& distances) {
  const std::size_t n = static_cast<std::size_t>(width) * height;

  // pass 1: g_s = sum_r Lambda_sr k_sr, the self term contributes 1
  std::vector<double> g(n, 1.0);
  for_each_window_pair(width, height, p, distances, true,
                       [&g](std::size_t s, std::size_t r, double lk) {
                         g[s] += lk;
                         g[r] += lk;
                       });
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = 1.0 / std::sqrt(std::max(g[i], kNormalizerFloor));

  // pass 2: row sums of the symmetrically normalized matrix, then their max
  std::vector<double> delta(n);
  for (std::size_t i = 0; i < n; ++i) delta[i] = q[i] * q[i];
  for_each_window_pair(width, height, p, distances, true,
                       [&delta, &q](std::size_t s, std::size_t r, double lk) {
                         const double v = q[s] * q[r] * lk;
                         delta[s] += v;
                         delta[r] += v;
                       });
  const double m = *std::max_element(delta.begin(), delta.end());
  return Normalizers{std::move(q), 1.0 / m};
}

template <class Distances>
Image apply_weights(const Image& input, const PatchParams& p, const Normalizers& norm,
                    Distances& distances) {
  const int width = input.width();
  const int height = input.height();
  const std::size_t n = input.size();
  const auto in = input.data();
  const auto& q = norm.inv_sqrt_row_sums;
  const double inv_m = norm.inv_max_row_sum;

  // pass 3: accumulate W * input and the row sums h of the scaled matrix
  Image out(width, height);
  auto acc = out.data();
  std::vector<double> row_sum(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = q[i] * q[i] * inv_m;
    acc[i] = w * in[i];
    row_sum[i] = w;
  }
  for_each_window_pair(width, height, p, distances, true,
                       [&](std::size_t s, std::size_t r, double lk) {
                         const double w = q[s] * q[r] * lk * inv_m;
                         acc[s] += w * in[r];
                         acc[r] += w * in[s];
                         row_sum[s] += w;
                         row_sum[r] += w;
                       });
  // diagonal correction restores unit row sums
  for (std::size_t i = 0; i < n; ++i) acc[i] += (1.0 - row_sum[i]) * in[i];
  return out;
}

void check_window(Offset t, int window_radius) {
  if (std::max(std::abs(t.dy), std::abs(t.dx)) > window_radius) {
    throw InvalidArgument("offset (" + std::to_string(t.dy) + "," + std::to_string(t.dx) +
                          ") lies outside the search window of radius " +
                          std::to_string(window_radius));
  }
}

void check_pixel(const Image& img, Pixel s) {
  if (s.row < 0 || s.col < 0 || s.row >= img.height() || s.col >= img.width()) {
    throw InvalidArgument("pixel (" + std::to_string(s.row) + "," + std::to_string(s.col) +
                          ") is outside the image");
  }
}

}  // namespace

void validate(const PatchParams& p) {
  if (p.patch_side < 1 || p.patch_side % 2 == 0) {
    throw InvalidArgument("patch side must be odd and >= 1, got " + std::to_string(p.patch_side));
  }
  if (p.window_radius < 1) {
    throw InvalidArgument("window radius must be >= 1, got " + std::to_string(p.window_radius));
  }
  if (!(p.bandwidth > 0.0) || !std::isfinite(p.bandwidth)) {
    throw InvalidArgument("bandwidth must be positive and finite");
  }
}

double nlm_kernel(const Image& guide, Pixel s, Pixel r, const PatchParams& p) {
  validate(p);
  check_pixel(guide, s);
  check_pixel(guide, r);
  const int half = p.patch_half();
  double ssd = 0.0;
  for (int a = -half; a <= half; ++a) {
    const int sr = reflect_index(s.row + a, guide.height());
    const int rr = reflect_index(r.row + a, guide.height());
    for (int b = -half; b <= half; ++b) {
      const double e = guide(sr, reflect_index(s.col + b, guide.width())) -
                       guide(rr, reflect_index(r.col + b, guide.width()));
      ssd += e * e;
    }
  }
  return std::exp(-ssd * kernel_scale(p));
}

Image patch_distance_map(const Image& guide, Offset t, const PatchParams& p) {
  validate(p);
  check_window(t, p.window_radius);
  const PaddedGuide padded(guide, p.window_radius + p.patch_half());
  IntegralDistances distances(padded, p.patch_side);
  Image out(guide.width(), guide.height());
  distances(t, Region{0, guide.height(), 0, guide.width()}, out.data());
  return out;
}

double hat_weight(Pixel s, Pixel r, int window_radius) {
  if (window_radius < 1) throw InvalidArgument("window radius must be >= 1");
  const Offset t{r.row - s.row, r.col - s.col};
  check_window(t, window_radius);
  const double scale = 1.0 / (window_radius + 1);
  return (1.0 - std::abs(t.dy) * scale) * (1.0 - std::abs(t.dx) * scale);
}

Image nlm_denoise(const Image& input, const Image& guide, const PatchParams& p) {
  validate(p);
  require_same_shape(input, guide, "nlm_denoise");
  const std::size_t n = input.size();
  const auto in = input.data();
  const PaddedGuide padded(guide, p.window_radius + p.patch_half());
  IntegralDistances distances(padded, p.patch_side);

  std::vector<double> num(in.begin(), in.end());
  std::vector<double> den(n, 1.0);
  for_each_window_pair(input.width(), input.height(), p, distances, false,
                       [&](std::size_t s, std::size_t r, double k) {
                         num[s] += k * in[r];
                         den[s] += k;
                         num[r] += k * in[s];
                         den[r] += k;
                       });
  Image out(input.width(), input.height());
  auto o = out.data();
  for (std::size_t i = 0; i < n; ++i) o[i] = num[i] / den[i];
  return out;
}

FrozenGuide::FrozenGuide(Image guide, const PatchParams& params)
    : guide_(std::move(guide)), params_(params), inv_sqrt_row_sums_(), inv_max_row_sum_(1.0) {
  validate(params_);
  const PaddedGuide padded(guide_, params_.window_radius + params_.patch_half());
  IntegralDistances distances(padded, params_.patch_side);
  Normalizers norm = compute_normalizers(guide_.width(), guide_.height(), params_, distances);
  inv_sqrt_row_sums_ = std::move(norm.inv_sqrt_row_sums);
  inv_max_row_sum_ = norm.inv_max_row_sum;
}

Image FrozenGuide::apply(const Image& input) const {
  require_same_shape(input, guide_, "FrozenGuide::apply");
  const PaddedGuide padded(guide_, params_.window_radius + params_.patch_half());
  IntegralDistances distances(padded, params_.patch_side);
  const Normalizers norm{inv_sqrt_row_sums_, inv_max_row_sum_};
  return apply_weights(input, params_, norm, distances);
}

FrozenGuide freeze_guide(const Image& guide, const PatchParams& p) { return FrozenGuide(guide, p); }

Image dsg_nlm_denoise(const Image& input, const Image& guide, const PatchParams& p) {
  validate(p);
  require_same_shape(input, guide, "dsg_nlm_denoise");
  return FrozenGuide(guide, p).apply(input);
}

Image dsg_nlm_denoise_brute_force(const Image& input, const Image& guide, const PatchParams& p) {
  validate(p);
  require_same_shape(input, guide, "dsg_nlm_denoise_brute_force");
  const PaddedGuide padded(guide, p.window_radius + p.patch_half());
  DirectDistances distances(padded, p.patch_side);
  const Normalizers norm = compute_normalizers(guide.width(), guide.height(), p, distances);
  return apply_weights(input, p, norm, distances);
}

}  // namespace lpnp
