#include "lpnp/dense_weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "lpnp/error.hpp"

namespace lpnp {

DenseWeights::DenseWeights(int width, int height, std::vector<double> entries)
    : width_(width), height_(height), n_(static_cast<std::size_t>(width) * height),
      entries_(std::move(entries)) {
  if (entries_.size() != n_ * n_) throw DimensionMismatch("dense weight matrix has the wrong size");
}

Image DenseWeights::apply(const Image& input) const {
  if (input.width() != width_ || input.height() != height_) {
    throw DimensionMismatch("dense weights built for a different image size");
  }
  Image out(width_, height_);
  const auto in = input.data();
  auto o = out.data();
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    const double* row = entries_.data() + i * n_;
    for (std::size_t j = 0; j < n_; ++j) acc += row[j] * in[j];
    o[i] = acc;
  }
  return out;
}

DenseWeights build_dense_weights(const Image& guide, const PatchParams& p) {
  validate(p);
  const std::size_t n = guide.size();
  if (n > kMaxDensePixels) {
    throw InvalidArgument("dense weights limited to " + std::to_string(kMaxDensePixels) +
                          " pixels, image has " + std::to_string(n));
  }
  const int w = guide.width();
  std::vector<double> m(n * n, 0.0);
  auto in_window = [&](std::size_t s, std::size_t r) {
    const int ds = std::abs(static_cast<int>(s / w) - static_cast<int>(r / w));
    const int dc = std::abs(static_cast<int>(s % w) - static_cast<int>(r % w));
    return std::max(ds, dc) <= p.window_radius;
  };
  auto pixel = [w](std::size_t i) {
    return Pixel{static_cast<int>(i / w), static_cast<int>(i % w)};
  };

  // step 1: taper the kernel matrix
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t r = 0; r < n; ++r) {
      if (!in_window(s, r)) continue;
      m[s * n + r] = hat_weight(pixel(s), pixel(r), p.window_radius) *
                     nlm_kernel(guide, pixel(s), pixel(r), p);
    }
  }

  // step 2: w_sr / sqrt(rowsum_s * colsum_r)
  std::vector<double> row_sums(n, 0.0);
  std::vector<double> col_sums(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t r = 0; r < n; ++r) {
      row_sums[s] += m[s * n + r];
      col_sums[r] += m[s * n + r];
    }
  }
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t r = 0; r < n; ++r) {
      m[s * n + r] *= std::pow(row_sums[s], -0.5) * std::pow(col_sums[r], -0.5);
    }
  }

  // step 3: scale so the largest row sum is one, then fix the diagonal
  double max_row = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) acc += m[s * n + r];
    max_row = std::max(max_row, acc);
  }
  const double scale = 1.0 / max_row;
  for (double& v : m) v *= scale;
  for (std::size_t s = 0; s < n; ++s) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) acc += m[s * n + r];
    m[s * n + s] += 1.0 - acc;
  }
  return DenseWeights(guide.width(), guide.height(), std::move(m));
}

}  // namespace lpnp
