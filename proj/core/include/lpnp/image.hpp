#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace lpnp {

struct Pixel {
  int row;
  int col;
  friend bool operator==(Pixel, Pixel) = default;
};

/// Dense row-major grayscale image with double-precision samples.
///
/// Intensities are nominally in [0,1] but intermediates (ADMM iterates,
/// dual variables) are free to leave that range.
class Image {
 public:
  Image(int width, int height, double fill = 0.0);
  Image(int width, int height, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(int row, int col) const noexcept {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  double& operator()(int row, int col) noexcept {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  Image& operator+=(const Image& rhs);
  Image& operator-=(const Image& rhs);
  Image& operator*=(double s) noexcept;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_;
  int height_;
  std::vector<double> data_;
};

Image operator+(Image lhs, const Image& rhs);
Image operator-(Image lhs, const Image& rhs);
Image operator*(double s, Image img);

/// Throws DimensionMismatch naming `context` when shapes differ.
void require_same_shape(const Image& a, const Image& b, std::string_view context);

double dot(const Image& a, const Image& b);
double squared_norm(const Image& img) noexcept;
double max_abs_diff(const Image& a, const Image& b);
double mean(const Image& img) noexcept;
double min_value(const Image& img) noexcept;
double max_value(const Image& img) noexcept;
bool all_finite(const Image& img) noexcept;

/// Half-sample symmetric reflection of index `i` into [0, n).
///
/// -1 maps to 0, -2 to 1, n to n-1. Indices further out keep reflecting
/// (the extension is periodic with period 2n).
int reflect_index(int i, int n) noexcept;

/// Mirror-pads by `margin` on every side without repeating the edge pixel
/// twice in the reflected region: [a,b,c] with margin 1 gives [a,a,b,c,c].
/// Requires margin <= min(width, height).
Image pad_symmetric(const Image& img, int margin);

struct Unconstrained {};
struct NonNegative {};
struct Box {
  double lo;
  double hi;
};

using ConstraintSet = std::variant<Unconstrained, NonNegative, Box>;

/// Box constraint with lo < hi enforced.
Box make_box(double lo, double hi);

/// Euclidean projection onto the constraint set (per-pixel clamp).
Image project(const Image& img, const ConstraintSet& c);

/// Peak signal-to-noise ratio in dB; +infinity when the images are equal.
double psnr(const Image& reference, const Image& test, double peak = 1.0);

}  // namespace lpnp
