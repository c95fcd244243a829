#include "lpnp/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <sstream>
#include <string_view>
#include <vector>

#include "lpnp/error.hpp"

namespace lpnp {

namespace {

using Kind = IoError::Kind;

std::uint32_t byteswap32(std::uint32_t v) noexcept {
  return (v >> 24) | ((v >> 8) & 0x0000ff00u) | ((v << 8) & 0x00ff0000u) | (v << 24);
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(Kind::Open, "cannot open '" + path.string() + "' for reading");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Cursor over a netpbm-style header: whitespace separated tokens, '#'
/// starts a comment that runs to the end of the line.
class HeaderReader {
 public:
  HeaderReader(std::string_view bytes, const std::filesystem::path& path)
      : bytes_(bytes), path_(path) {}

  std::string_view token() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_])) &&
           bytes_[pos_] != '#') {
      ++pos_;
    }
    if (start == pos_) fail("unexpected end of header");
    return bytes_.substr(start, pos_ - start);
  }

  long long integer(std::string_view what) {
    const std::string_view tok = token();
    long long value = 0;
    for (char ch : tok) {
      if (!std::isdigit(static_cast<unsigned char>(ch))) fail("invalid " + std::string(what));
      value = value * 10 + (ch - '0');
      if (value > std::numeric_limits<int>::max()) fail(std::string(what) + " out of range");
    }
    return value;
  }

  double real(std::string_view what) {
    const std::string tok(token());
    std::istringstream is(tok);
    is.imbue(std::locale::classic());
    double v = 0.0;
    is >> v;
    if (!is || is.peek() != std::char_traits<char>::eof()) fail("invalid " + std::string(what));
    return v;
  }

  /// Exactly one whitespace byte separates the header from binary payload.
  std::size_t payload_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      fail("missing whitespace after header");
    }
    return pos_ + 1;
  }

  std::size_t position() const noexcept { return pos_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw IoError(Kind::MalformedHeader, "'" + path_.string() + "': " + msg);
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 2;  // past the magic
};

void check_size(long long w, long long h, const HeaderReader& hdr) {
  if (w < 1 || h < 1) hdr.fail("image dimensions must be positive");
  if (w * h > (1LL << 31)) hdr.fail("image dimensions too large");
}

Image read_pgm(std::string_view bytes, bool ascii, const std::filesystem::path& path) {
  HeaderReader hdr(bytes, path);
  const long long w = hdr.integer("width");
  const long long h = hdr.integer("height");
  check_size(w, h, hdr);
  const long long maxval = hdr.integer("maxval");
  if (maxval < 1 || maxval > 65535) hdr.fail("maxval must be in [1, 65535]");

  const std::size_t n = static_cast<std::size_t>(w * h);
  std::vector<double> data(n);
  const double scale = 1.0 / static_cast<double>(maxval);

  if (ascii) {
    HeaderReader body = hdr;
    for (std::size_t i = 0; i < n; ++i) {
      long long v = 0;
      try {
        v = body.integer("sample");
      } catch (const IoError&) {
        if (body.position() >= bytes.size()) {
          throw IoError(Kind::TruncatedPayload, "'" + path.string() + "': expected " +
                                                    std::to_string(n) + " samples, got " +
                                                    std::to_string(i));
        }
        throw;
      }
      if (v > maxval) body.fail("sample exceeds maxval");
      data[i] = static_cast<double>(v) * scale;
    }
  } else {
    const std::size_t offset = hdr.payload_offset();
    const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
    const std::size_t need = n * bytes_per_sample;
    if (bytes.size() < offset + need) {
      throw IoError(Kind::TruncatedPayload, "'" + path.string() + "': payload has " +
                                                std::to_string(bytes.size() - offset) +
                                                " bytes, expected " + std::to_string(need));
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
    for (std::size_t i = 0; i < n; ++i) {
      // 16-bit samples are big-endian
      const unsigned v = bytes_per_sample == 1 ? p[i] : (unsigned{p[2 * i]} << 8) | p[2 * i + 1];
      if (v > maxval) hdr.fail("sample exceeds maxval");
      data[i] = static_cast<double>(v) * scale;
    }
  }
  return Image(static_cast<int>(w), static_cast<int>(h), std::move(data));
}

Image read_pfm(std::string_view bytes, const std::filesystem::path& path) {
  HeaderReader hdr(bytes, path);
  const long long w = hdr.integer("width");
  const long long h = hdr.integer("height");
  check_size(w, h, hdr);
  const double scale = hdr.real("scale");
  if (scale == 0.0 || !std::isfinite(scale)) hdr.fail("scale must be finite and nonzero");
  const bool little = scale < 0.0;
  const std::size_t offset = hdr.payload_offset();
  const std::size_t n = static_cast<std::size_t>(w * h);
  if (bytes.size() < offset + 4 * n) {
    throw IoError(Kind::TruncatedPayload, "'" + path.string() + "': payload has " +
                                              std::to_string(bytes.size() - offset) +
                                              " bytes, expected " + std::to_string(4 * n));
  }
  std::vector<double> data(n);
  const char* p = bytes.data() + offset;
  for (long long row = 0; row < h; ++row) {
    // rows are stored bottom to top
    const std::size_t dst_row = static_cast<std::size_t>(h - 1 - row);
    for (long long col = 0; col < w; ++col) {
      std::uint32_t bits = 0;
      std::memcpy(&bits, p, 4);
      p += 4;
      if ((std::endian::native == std::endian::little) != little) bits = byteswap32(bits);
      data[dst_row * static_cast<std::size_t>(w) + static_cast<std::size_t>(col)] =
          static_cast<double>(std::bit_cast<float>(bits));
    }
  }
  return Image(static_cast<int>(w), static_cast<int>(h), std::move(data));
}

void write_bytes(const std::filesystem::path& path, std::string_view header,
                 const std::vector<unsigned char>& payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(Kind::Write, "cannot open '" + path.string() + "' for writing");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError(Kind::Write, "failed writing '" + path.string() + "'");
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
  const std::string bytes = read_all(path);
  if (bytes.size() < 2) throw IoError(Kind::UnsupportedFormat, "'" + path.string() + "' is too short");
  const std::string_view magic(bytes.data(), 2);
  if (magic == "P5") return read_pgm(bytes, false, path);
  if (magic == "P2") return read_pgm(bytes, true, path);
  if (magic == "Pf") return read_pfm(bytes, path);
  throw IoError(Kind::UnsupportedFormat,
                "'" + path.string() + "': unsupported magic '" + std::string(magic) + "'");
}

unsigned char quantize_8bit(double v) noexcept {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  if (v >= 1.0) return 255;
  return static_cast<unsigned char>(std::floor(v * 255.0 + 0.5));
}

void write_image(const Image& img, const std::filesystem::path& path, ImageFormat format) {
  const std::size_t n = img.size();
  std::vector<unsigned char> payload;
  std::string header;
  const std::string dims = std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n";
  if (format == ImageFormat::Pgm8) {
    header = "P5\n" + dims + "255\n";
    payload.resize(n);
    std::transform(img.data().begin(), img.data().end(), payload.begin(), quantize_8bit);
  } else {
    header = "Pf\n" + dims + "-1.0\n";
    payload.resize(4 * n);
    unsigned char* p = payload.data();
    for (int row = img.height() - 1; row >= 0; --row) {
      for (int col = 0; col < img.width(); ++col) {
        std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(img(row, col)));
        if constexpr (std::endian::native == std::endian::big) bits = byteswap32(bits);
        std::memcpy(p, &bits, 4);
        p += 4;
      }
    }
  }
  write_bytes(path, header, payload);
}

ImageFormat format_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".pgm") return ImageFormat::Pgm8;
  if (ext == ".pfm") return ImageFormat::Pfm;
  throw IoError(Kind::UnsupportedFormat,
                "'" + path.string() + "': expected a .pgm or .pfm extension");
}

}  // namespace lpnp
