#include "lpnp/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lpnp/error.hpp"

namespace lpnp {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw InvalidArgument("image dimensions must be positive, got " + std::to_string(width) +
                          "x" + std::to_string(height));
  }
}

}  // namespace

Image::Image(int width, int height, double fill) : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

Image::Image(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw DimensionMismatch("image data length " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(width) + "x" +
                            std::to_string(height));
  }
}

Image& Image::operator+=(const Image& rhs) {
  require_same_shape(*this, rhs, "image addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

Image& Image::operator-=(const Image& rhs) {
  require_same_shape(*this, rhs, "image subtraction");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

Image& Image::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

Image operator+(Image lhs, const Image& rhs) { return lhs += rhs; }
Image operator-(Image lhs, const Image& rhs) { return lhs -= rhs; }
Image operator*(double s, Image img) { return img *= s; }

void require_same_shape(const Image& a, const Image& b, std::string_view context) {
  if (!a.same_shape(b)) {
    throw DimensionMismatch(std::string(context) + ": " + std::to_string(a.width()) + "x" +
                            std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                            "x" + std::to_string(b.height()));
  }
}

double dot(const Image& a, const Image& b) {
  require_same_shape(a, b, "dot");
  double acc = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) acc += da[i] * db[i];
  return acc;
}

double squared_norm(const Image& img) noexcept {
  double acc = 0.0;
  for (double v : img.data()) acc += v * v;
  return acc;
}

double max_abs_diff(const Image& a, const Image& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) m = std::max(m, std::abs(da[i] - db[i]));
  return m;
}

double mean(const Image& img) noexcept {
  double acc = 0.0;
  for (double v : img.data()) acc += v;
  return acc / static_cast<double>(img.size());
}

double min_value(const Image& img) noexcept {
  return *std::min_element(img.data().begin(), img.data().end());
}

double max_value(const Image& img) noexcept {
  return *std::max_element(img.data().begin(), img.data().end());
}

bool all_finite(const Image& img) noexcept {
  return std::all_of(img.data().begin(), img.data().end(),
                     [](double v) { return std::isfinite(v); });
}

int reflect_index(int i, int n) noexcept {
  const int period = 2 * n;
  int j = i % period;
  if (j < 0) j += period;
  return j < n ? j : period - 1 - j;
}

Image pad_symmetric(const Image& img, int margin) {
  if (margin < 0) throw InvalidArgument("padding margin must be non-negative");
  if (margin > std::min(img.width(), img.height())) {
    throw InvalidArgument("padding margin " + std::to_string(margin) +
                          " exceeds the smaller image side " +
                          std::to_string(std::min(img.width(), img.height())));
  }
  const int w = img.width() + 2 * margin;
  const int h = img.height() + 2 * margin;
  Image out(w, h);
  for (int r = 0; r < h; ++r) {
    const int src_r = reflect_index(r - margin, img.height());
    for (int c = 0; c < w; ++c) {
      out(r, c) = img(src_r, reflect_index(c - margin, img.width()));
    }
  }
  return out;
}

Box make_box(double lo, double hi) {
  if (!(lo < hi)) throw InvalidArgument("box constraint requires lo < hi");
  return Box{lo, hi};
}

Image project(const Image& img, const ConstraintSet& c) {
  Image out = img;
  std::visit(
      [&out](const auto& set) {
        using T = std::decay_t<decltype(set)>;
        if constexpr (std::is_same_v<T, NonNegative>) {
          for (double& v : out.data()) v = std::max(v, 0.0);
        } else if constexpr (std::is_same_v<T, Box>) {
          if (!(set.lo < set.hi)) throw InvalidArgument("box constraint requires lo < hi");
          for (double& v : out.data()) v = std::clamp(v, set.lo, set.hi);
        }
      },
      c);
  return out;
}

double psnr(const Image& reference, const Image& test, double peak) {
  require_same_shape(reference, test, "psnr");
  if (!(peak > 0.0)) throw InvalidArgument("psnr peak must be positive");
  double sse = 0.0;
  auto a = reference.data();
  auto b = test.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sse += d * d;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(a.size());
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace lpnp
