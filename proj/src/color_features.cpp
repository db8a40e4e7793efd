#include "cbvr/color_features.hpp"

#include "cbvr/error.hpp"
#include "cbvr/keyframe.hpp"

#include <algorithm>
#include <array>

namespace cbvr {

int quantize_hsv(int r, int g, int b) noexcept {
  const int hi = std::max({r, g, b});
  const int lo = std::min({r, g, b});
  const int delta = hi - lo;

  const int v_idx = std::min(3, hi * 4 / 255);
  const int s_idx = hi == 0 ? 0 : std::min(3, delta * 4 / hi);

  int h_idx = 0;
  if (delta > 0) {
    // Hue measured in units of delta over [0, 6*delta); 16 bins span 6 sectors.
    int hue;
    if (hi == r) {
      hue = g - b;
      if (hue < 0) hue += 6 * delta;
    } else if (hi == g) {
      hue = b - r + 2 * delta;
    } else {
      hue = r - g + 4 * delta;
    }
    h_idx = std::min(15, hue * 8 / (3 * delta));
  }
  return h_idx * 16 + s_idx * 4 + v_idx;
}

ColorHistogram rgb_histogram(const Raster& r) {
  ColorHistogram h;
  const auto& red = r.channel(0);
  const auto& green = r.channel(1);
  const auto& blue = r.channel(2);
  for (Eigen::Index i = 0; i < red.size(); ++i) {
    ++h.bins(quantize_rgb(red.data()[i], green.data()[i], blue.data()[i]));
  }
  h.total = red.size();
  return h;
}

Eigen::Array<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> correlogram_counts(const Raster& r,
                                                                            int max_distance) {
  if (max_distance < 1) throw Error(ErrorKind::InvalidArgument, "correlogram distance must be >= 1");
  const int w = r.width();
  const int h = r.height();

  Plane<int> quant(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Rgb p = r.at(x, y);
      quant(y, x) = quantize_hsv(p.r, p.g, p.b);
    }
  }

  Eigen::Array<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts =
      Eigen::Array<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(kColorBins, max_distance);
  auto same = [&](int x, int y, int color) {
    return x >= 0 && y >= 0 && x < w && y < h && quant(y, x) == color;
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int color = quant(y, x);
      for (int d = 1; d <= max_distance; ++d) {
        std::int64_t n = 0;
        for (int dx = -d; dx <= d; ++dx) {
          n += same(x + dx, y - d, color);
          n += same(x + dx, y + d, color);
        }
        for (int dy = -d + 1; dy <= d - 1; ++dy) {
          n += same(x - d, y + dy, color);
          n += same(x + d, y + dy, color);
        }
        counts(color, d - 1) += n;
      }
    }
  }
  return counts;
}

AutoCorrelogram auto_correlogram(const Raster& r, int max_distance) {
  const auto counts = correlogram_counts(r, max_distance);
  AutoCorrelogram out;
  out.values = counts.cast<double>();
  for (int d = 0; d < max_distance; ++d) {
    const double peak = out.values.col(d).maxCoeff();
    if (peak > 0.0) out.values.col(d) /= peak;
  }
  return out;
}

NaiveSignature naive_signature(const Raster& r) {
  constexpr int kBase = kComparisonSize;
  constexpr int kHalfWindow = 15;
  constexpr std::array<double, NaiveSignature::kGrid> kFractions = {0.1, 0.3, 0.5, 0.7, 0.9};

  const Raster scaled = rescale(r, kBase, kBase);
  NaiveSignature sig;
  for (int gy = 0; gy < NaiveSignature::kGrid; ++gy) {
    for (int gx = 0; gx < NaiveSignature::kGrid; ++gx) {
      const int cx = static_cast<int>(kFractions[gx] * kBase + 0.5);
      const int cy = static_cast<int>(kFractions[gy] * kBase + 0.5);
      const int x0 = std::max(0, cx - kHalfWindow);
      const int y0 = std::max(0, cy - kHalfWindow);
      const int x1 = std::min(kBase, cx + kHalfWindow);
      const int y1 = std::min(kBase, cy + kHalfWindow);
      const double n = static_cast<double>(x1 - x0) * (y1 - y0);
      for (int c = 0; c < 3; ++c) {
        const auto block = scaled.channel(c).block(y0, x0, y1 - y0, x1 - x0).cast<double>();
        sig.points(gy * NaiveSignature::kGrid + gx, c) = block.sum() / n;
      }
    }
  }
  return sig;
}

}  // namespace cbvr
