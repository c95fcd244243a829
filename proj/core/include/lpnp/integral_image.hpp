#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lpnp/image.hpp"

namespace lpnp {

/// Summed-area table with a zero first row and column.
///
/// at(i, j) is the sum of source values over rows < i and cols < j, so the
/// table is (height+1) x (width+1).
class IntegralImage {
 public:
  IntegralImage() = default;
  explicit IntegralImage(const Image& src);

  /// Builds from a raw row-major buffer; used by hot loops that reuse storage.
  IntegralImage(std::span<const double> src, int width, int height);

  /// Recomputes in place from a buffer of the given shape, reusing capacity.
  void assign(std::span<const double> src, int width, int height);

  int source_width() const noexcept { return width_; }
  int source_height() const noexcept { return height_; }

  double at(int i, int j) const noexcept {
    return sums_[static_cast<std::size_t>(i) * (width_ + 1) + j];
  }

  /// Sum over the size x size box with top-left source pixel (top, left).
  /// Throws InvalidArgument when the box leaves the source extent.
  double box_sum(int top, int left, int size) const;

  double box_sum_unchecked(int top, int left, int size) const noexcept {
    return at(top + size, left + size) - at(top, left + size) - at(top + size, left) +
           at(top, left);
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> sums_;
};

IntegralImage integral_image(const Image& img);

double box_sum(const IntegralImage& ii, int top, int left, int size);

}  // namespace lpnp
