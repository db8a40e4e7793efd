#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cbvr {

/// Row-major pixel plane: rows are image rows (y), columns are x.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Bytes = std::vector<std::uint8_t>;

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Three-channel 8-bit image. Width and height are always positive.
class Raster {
 public:
  Raster(int width, int height, Rgb fill = {});
  Raster(Plane<std::uint8_t> red, Plane<std::uint8_t> green, Plane<std::uint8_t> blue);

  int width() const noexcept { return static_cast<int>(channels_[0].cols()); }
  int height() const noexcept { return static_cast<int>(channels_[0].rows()); }

  Rgb at(int x, int y) const noexcept {
    return {channels_[0](y, x), channels_[1](y, x), channels_[2](y, x)};
  }
  void set(int x, int y, Rgb p) noexcept {
    channels_[0](y, x) = p.r;
    channels_[1](y, x) = p.g;
    channels_[2](y, x) = p.b;
  }

  /// 0 = red, 1 = green, 2 = blue.
  const Plane<std::uint8_t>& channel(int c) const noexcept { return channels_[c]; }

  friend bool operator==(const Raster& a, const Raster& b);

 private:
  std::array<Plane<std::uint8_t>, 3> channels_;
};

struct GrayRaster {
  Plane<std::uint8_t> pixels;

  int width() const noexcept { return static_cast<int>(pixels.cols()); }
  int height() const noexcept { return static_cast<int>(pixels.rows()); }
  std::uint8_t at(int x, int y) const noexcept { return pixels(y, x); }

  friend bool operator==(const GrayRaster& a, const GrayRaster& b) {
    return a.pixels.rows() == b.pixels.rows() && a.pixels.cols() == b.pixels.cols() &&
           (a.pixels == b.pixels).all();
  }
};

/// Pixels are exactly 0 or 1.
struct BinaryRaster {
  Plane<std::uint8_t> pixels;

  int width() const noexcept { return static_cast<int>(pixels.cols()); }
  int height() const noexcept { return static_cast<int>(pixels.rows()); }
  std::uint8_t at(int x, int y) const noexcept { return pixels(y, x); }

  friend bool operator==(const BinaryRaster& a, const BinaryRaster& b) {
    return a.pixels.rows() == b.pixels.rows() && a.pixels.cols() == b.pixels.cols() &&
           (a.pixels == b.pixels).all();
  }
};

using Bins256 = Eigen::Array<std::int64_t, 256, 1>;

/// 256-bin count histogram. Used both for gray intensities and for the
/// quantized RGB color histogram.
struct Histogram256 {
  Bins256 bins = Bins256::Zero();
  std::int64_t total = 0;

  friend bool operator==(const Histogram256& a, const Histogram256& b) {
    return a.total == b.total && (a.bins == b.bins).all();
  }
};

enum class ImageFormat { Pnm, Png, Jpeg };

/// Decodes binary P5/P6 portable any-maps (P5 is expanded to RGB), plus PNG
/// and JPEG when the build found libpng / libjpeg. Throws UnsupportedFormat
/// or CorruptImage.
Raster load_frame(std::span<const std::uint8_t> bytes,
                  std::optional<ImageFormat> format_hint = std::nullopt);
Raster load_frame_file(const std::string& path);

/// Binary P6 encoding with maxval 255.
Bytes encode_ppm(const Raster& r);

/// Nearest-neighbor resampling: out(x, y) = in(floor(x*srcW/w), floor(y*srcH/h)).
Raster rescale(const Raster& r, int width, int height);
GrayRaster rescale(const GrayRaster& g, int width, int height);

/// BT.601 luma, rounded and clamped to [0, 255].
GrayRaster to_grayscale(const Raster& r);

Histogram256 gray_histogram(const GrayRaster& g);

}  // namespace cbvr
