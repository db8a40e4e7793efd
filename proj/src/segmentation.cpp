#include "cbvr/segmentation.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace cbvr {

MorphKernel MorphKernel::centered_square() {
  MorphKernel k;
  k.mask.setZero();
  k.mask.block<3, 3>(1, 1).setOnes();
  return k;
}

int fuzziness_threshold(const Histogram256& h) {
  int lo = 0;
  while (lo < 255 && h.bins(lo) == 0) ++lo;
  int hi = 255;
  while (hi > 0 && h.bins(hi) == 0) --hi;
  if (lo >= hi) return lo;

  const double span = static_cast<double>(hi - lo);
  auto shannon = [](double mu) {
    if (mu <= 0.0 || mu >= 1.0) return 0.0;
    return -mu * std::log(mu) - (1.0 - mu) * std::log(1.0 - mu);
  };

  // Running sums give each class mean in O(1).
  Eigen::Array<double, 256, 1> count_prefix;
  Eigen::Array<double, 256, 1> moment_prefix;
  double c = 0.0;
  double s = 0.0;
  for (int g = 0; g < 256; ++g) {
    c += static_cast<double>(h.bins(g));
    s += static_cast<double>(h.bins(g)) * g;
    count_prefix(g) = c;
    moment_prefix(g) = s;
  }

  int best = lo;
  double best_fuzz = std::numeric_limits<double>::infinity();
  for (int t = lo; t < hi; ++t) {
    const double mean_low = moment_prefix(t) / count_prefix(t);
    const double mean_high = (moment_prefix(255) - moment_prefix(t)) / (count_prefix(255) - count_prefix(t));
    double fuzz = 0.0;
    for (int g = lo; g <= hi; ++g) {
      if (h.bins(g) == 0) continue;
      const double mean = g <= t ? mean_low : mean_high;
      fuzz += static_cast<double>(h.bins(g)) * shannon(1.0 / (1.0 + std::abs(g - mean) / span));
    }
    if (fuzz < best_fuzz) {
      best_fuzz = fuzz;
      best = t;
    }
  }
  return best;
}

BinaryRaster binarize(const GrayRaster& g) {
  const int t = fuzziness_threshold(gray_histogram(g));
  return BinaryRaster{(g.pixels.cast<int>() > t).cast<std::uint8_t>()};
}

namespace {

template <bool kDilate>
BinaryRaster morph(const BinaryRaster& in, const MorphKernel& k) {
  const int w = in.width();
  const int h = in.height();
  BinaryRaster out{Plane<std::uint8_t>(h, w)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t v = kDilate ? 0 : 1;
      for (int ky = 0; ky < 5; ++ky) {
        for (int kx = 0; kx < 5; ++kx) {
          if (!k.mask(ky, kx)) continue;
          const int sx = x + kx - 2;
          const int sy = y + ky - 2;
          if (sx < 0 || sy < 0 || sx >= w || sy >= h) continue;
          if constexpr (kDilate) {
            v |= in.pixels(sy, sx);
          } else {
            v &= in.pixels(sy, sx);
          }
        }
      }
      out.pixels(y, x) = v;
    }
  }
  return out;
}

}  // namespace

BinaryRaster dilate(const BinaryRaster& b, const MorphKernel& k) { return morph<true>(b, k); }
BinaryRaster erode(const BinaryRaster& b, const MorphKernel& k) { return morph<false>(b, k); }

BinaryRaster morph_close_open(const BinaryRaster& b, const MorphKernel& k) {
  return dilate(erode(erode(dilate(b, k), k), k), k);
}

RegionLabeling grow_regions(const BinaryRaster& b) {
  const int w = b.width();
  const int h = b.height();
  RegionLabeling out;
  out.labels = Plane<std::int32_t>::Zero(h, w);

  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (out.labels(y, x) != 0) continue;
      const std::uint8_t value = b.pixels(y, x);
      if (value == 0) ++out.num_holes;
      const int id = ++out.number_of_regions;
      out.labels(y, x) = id;
      std::int64_t size = 1;
      stack.emplace_back(x, y);
      while (!stack.empty()) {
        const auto [px, py] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int rx = px + dx;
            const int ry = py + dy;
            if (rx < 0 || ry < 0 || rx >= w || ry >= h) continue;
            if (out.labels(ry, rx) != 0 || b.pixels(ry, rx) != value) continue;
            out.labels(ry, rx) = id;
            ++size;
            stack.emplace_back(rx, ry);
          }
        }
      }
      out.region_sizes.push_back(size);
    }
  }
  return out;
}

int major_regions(const RegionLabeling& l, double min_fraction) {
  const double total = static_cast<double>(l.labels.size());
  int n = 0;
  for (const auto size : l.region_sizes) {
    if (static_cast<double>(size) >= min_fraction * total) ++n;
  }
  return n;
}

int count_major_regions(const GrayRaster& g, double min_fraction) {
  return major_regions(grow_regions(morph_close_open(binarize(g))), min_fraction);
}

}  // namespace cbvr
