#pragma once

#include <cstddef>
#include <vector>

#include "lpnp/denoiser.hpp"
#include "lpnp/image.hpp"

namespace lpnp {

/// Explicit n x n DSG-NLM weight matrix (n = width * height), row-major.
/// Only meant for verification at small sizes.
class DenseWeights {
 public:
  DenseWeights(int width, int height, std::vector<double> entries);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t dimension() const noexcept { return n_; }

  double operator()(std::size_t row, std::size_t col) const noexcept {
    return entries_[row * n_ + col];
  }
  const std::vector<double>& entries() const noexcept { return entries_; }

  /// Matrix-vector product on the vectorized image.
  Image apply(const Image& input) const;

 private:
  int width_;
  int height_;
  std::size_t n_;
  std::vector<double> entries_;
};

inline constexpr std::size_t kMaxDensePixels = 4096;

/// Builds W from the guide by literally applying the three matrix steps
/// (taper, symmetric row/column normalization, max-row-sum scaling with a
/// diagonal correction) to the NLM kernel matrix. Throws InvalidArgument
/// when the image has more than kMaxDensePixels pixels.
DenseWeights build_dense_weights(const Image& guide, const PatchParams& p);

}  // namespace lpnp
