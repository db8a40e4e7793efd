#include "cbvr/imaging.hpp"

#include "cbvr/error.hpp"

#include <string>

namespace cbvr {

namespace {

void require_positive(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::InvalidDimensions,
                "dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
}

// Source index lookup tables for nearest-neighbor sampling.
std::vector<Eigen::Index> nearest_map(Eigen::Index src, Eigen::Index dst) {
  std::vector<Eigen::Index> map(static_cast<std::size_t>(dst));
  for (Eigen::Index i = 0; i < dst; ++i) map[static_cast<std::size_t>(i)] = i * src / dst;
  return map;
}

Plane<std::uint8_t> rescale_plane(const Plane<std::uint8_t>& in, int width, int height) {
  if (in.cols() == width && in.rows() == height) return in;
  const auto xs = nearest_map(in.cols(), width);
  const auto ys = nearest_map(in.rows(), height);
  Plane<std::uint8_t> out(height, width);
  for (int y = 0; y < height; ++y) {
    const auto sy = ys[static_cast<std::size_t>(y)];
    for (int x = 0; x < width; ++x) out(y, x) = in(sy, xs[static_cast<std::size_t>(x)]);
  }
  return out;
}

}  // namespace

Raster::Raster(int width, int height, Rgb fill) {
  require_positive(width, height);
  channels_[0] = Plane<std::uint8_t>::Constant(height, width, fill.r);
  channels_[1] = Plane<std::uint8_t>::Constant(height, width, fill.g);
  channels_[2] = Plane<std::uint8_t>::Constant(height, width, fill.b);
}

Raster::Raster(Plane<std::uint8_t> red, Plane<std::uint8_t> green, Plane<std::uint8_t> blue)
    : channels_{std::move(red), std::move(green), std::move(blue)} {
  require_positive(static_cast<int>(channels_[0].cols()), static_cast<int>(channels_[0].rows()));
  for (int c = 1; c < 3; ++c) {
    if (channels_[c].rows() != channels_[0].rows() || channels_[c].cols() != channels_[0].cols()) {
      throw Error(ErrorKind::InvalidDimensions, "channel planes differ in shape");
    }
  }
}

bool operator==(const Raster& a, const Raster& b) {
  if (a.width() != b.width() || a.height() != b.height()) return false;
  for (int c = 0; c < 3; ++c) {
    if (!(a.channels_[c] == b.channels_[c]).all()) return false;
  }
  return true;
}

Raster rescale(const Raster& r, int width, int height) {
  require_positive(width, height);
  return Raster(rescale_plane(r.channel(0), width, height), rescale_plane(r.channel(1), width, height),
                rescale_plane(r.channel(2), width, height));
}

GrayRaster rescale(const GrayRaster& g, int width, int height) {
  require_positive(width, height);
  return GrayRaster{rescale_plane(g.pixels, width, height)};
}

GrayRaster to_grayscale(const Raster& r) {
  // Integer weights keep the rounding exact: round(0.299R + 0.587G + 0.114B).
  const auto luma = (r.channel(0).cast<std::int32_t>() * 299 + r.channel(1).cast<std::int32_t>() * 587 +
                     r.channel(2).cast<std::int32_t>() * 114 + 500) /
                    1000;
  return GrayRaster{luma.min(255).max(0).cast<std::uint8_t>()};
}

Histogram256 gray_histogram(const GrayRaster& g) {
  Histogram256 h;
  for (Eigen::Index i = 0; i < g.pixels.size(); ++i) ++h.bins(g.pixels.data()[i]);
  h.total = g.pixels.size();
  return h;
}

}  // namespace cbvr
