#include "lpnp/integral_image.hpp"

#include <string>

#include "lpnp/error.hpp"

namespace lpnp {

IntegralImage::IntegralImage(const Image& src) : IntegralImage(src.data(), src.width(), src.height()) {}

IntegralImage::IntegralImage(std::span<const double> src, int width, int height) {
  assign(src, width, height);
}

void IntegralImage::assign(std::span<const double> src, int width, int height) {
  if (width < 1 || height < 1 || src.size() != static_cast<std::size_t>(width) * height) {
    throw DimensionMismatch("integral image source buffer does not match its shape");
  }
  width_ = width;
  height_ = height;
  const std::size_t stride = static_cast<std::size_t>(width) + 1;
  sums_.assign(stride * (static_cast<std::size_t>(height) + 1), 0.0);
  for (int i = 0; i < height; ++i) {
    const double* row = src.data() + static_cast<std::size_t>(i) * width;
    const double* above = sums_.data() + static_cast<std::size_t>(i) * stride;
    double* out = sums_.data() + static_cast<std::size_t>(i + 1) * stride;
    double running = 0.0;
    for (int j = 0; j < width; ++j) {
      running += row[j];
      out[j + 1] = above[j + 1] + running;
    }
  }
}

double IntegralImage::box_sum(int top, int left, int size) const {
  if (size < 1 || top < 0 || left < 0 || top + size > height_ || left + size > width_) {
    throw InvalidArgument("box (" + std::to_string(top) + "," + std::to_string(left) + ") of size " +
                          std::to_string(size) + " is outside a " + std::to_string(width_) + "x" +
                          std::to_string(height_) + " source");
  }
  return box_sum_unchecked(top, left, size);
}

IntegralImage integral_image(const Image& img) { return IntegralImage(img); }

double box_sum(const IntegralImage& ii, int top, int left, int size) {
  return ii.box_sum(top, left, size);
}

}  // namespace lpnp
