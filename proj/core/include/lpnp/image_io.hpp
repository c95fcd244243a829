#pragma once

#include <filesystem>
#include <string>

#include "lpnp/image.hpp"

namespace lpnp {

enum class ImageFormat {
  Pgm8,  ///< binary P5, maxval 255
  Pfm,   ///< grayscale "Pf", float32 little-endian
};

/// Reads PGM (P2 or P5, maxval <= 65535) or grayscale PFM.
///
/// PGM samples are divided by maxval; PFM samples are taken as stored.
/// Failures throw IoError whose kind() separates open errors, unknown magic,
/// malformed headers and truncated payloads.
Image read_image(const std::filesystem::path& path);

/// Writes an image. PGM8 quantizes floor(clamp(v,0,1)*255 + 0.5); PFM stores
/// float32 samples bottom row first, as the format prescribes.
void write_image(const Image& img, const std::filesystem::path& path, ImageFormat format);

/// Picks the format from the extension: ".pgm" or ".pfm" (case-insensitive).
ImageFormat format_from_extension(const std::filesystem::path& path);

/// The byte a PGM8 export stores for a sample.
unsigned char quantize_8bit(double v) noexcept;

}  // namespace lpnp
