#pragma once

#include "cbvr/imaging.hpp"
#include "cbvr/retrieval.hpp"

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace cbvr::test {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Raster random_raster(Rng& rng, int w, int h, int levels = 256) {
  Raster r(w, h);
  const int step = 256 / levels;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      r.set(x, y, {static_cast<std::uint8_t>(uniform_int(rng, 0, levels - 1) * step),
                   static_cast<std::uint8_t>(uniform_int(rng, 0, levels - 1) * step),
                   static_cast<std::uint8_t>(uniform_int(rng, 0, levels - 1) * step)});
    }
  }
  return r;
}

/// Pixels drawn from a small palette so equal colors are common.
inline Raster palette_raster(Rng& rng, int w, int h, const std::vector<Rgb>& palette) {
  Raster r(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) r.set(x, y, palette[static_cast<std::size_t>(uniform_int(rng, 0, int(palette.size()) - 1))]);
  }
  return r;
}

inline GrayRaster random_gray(Rng& rng, int w, int h, int lo = 0, int hi = 255) {
  GrayRaster g{Plane<std::uint8_t>(h, w)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) g.pixels(y, x) = static_cast<std::uint8_t>(uniform_int(rng, lo, hi));
  }
  return g;
}

inline GrayRaster constant_gray(int w, int h, std::uint8_t v) {
  return GrayRaster{Plane<std::uint8_t>::Constant(h, w, v)};
}

inline BinaryRaster random_binary(Rng& rng, int w, int h, double p_one = 0.5) {
  std::bernoulli_distribution coin(p_one);
  BinaryRaster b{Plane<std::uint8_t>(h, w)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) b.pixels(y, x) = coin(rng) ? 1 : 0;
  }
  return b;
}

inline Raster gray_to_raster(const GrayRaster& g) { return Raster(g.pixels, g.pixels, g.pixels); }

/// Random first frame, then small pixel edits with an occasional cut.
inline std::vector<Raster> drifting_sequence(Rng& rng, int n, int w, int h) {
  std::vector<Raster> frames{random_raster(rng, w, h)};
  for (int i = 1; i < n; ++i) {
    Raster next = frames.back();
    if (uniform_int(rng, 0, 9) == 0) {
      next = random_raster(rng, w, h);
    } else {
      const int touches = uniform_int(rng, 0, 3);
      for (int t = 0; t < touches; ++t) {
        const int x = uniform_int(rng, 0, w - 1);
        const int y = uniform_int(rng, 0, h - 1);
        auto p = next.at(x, y);
        p.r = static_cast<std::uint8_t>(std::clamp(p.r + uniform_int(rng, -12, 12), 0, 255));
        p.g = static_cast<std::uint8_t>(std::clamp(p.g + uniform_int(rng, -12, 12), 0, 255));
        next.set(x, y, p);
      }
    }
    frames.push_back(next);
  }
  return frames;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "cbvr") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
             std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const Bytes& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Relative path -> contents for every regular file under root.
inline std::map<std::string, std::string> tree_contents(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  if (!std::filesystem::exists(root)) return out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    const auto rel = std::filesystem::relative(e.path(), root).string();
    out[rel] = e.is_regular_file() ? read_file(e.path()) : std::string("<dir>");
  }
  return out;
}

/// Color histogram of a reference 300x300 query frame.
inline const std::vector<std::int64_t> kSampleQueryHistogram = {
    19401, 2570, 1848, 1098, 774, 552, 425, 312, 231, 214, 169, 176, 186, 152, 174, 157, 149, 128, 128, 125, 126, 136,
    118,   131,  130,  110,  141, 125, 134, 133, 150, 138, 148, 139, 134, 142, 154, 163, 135, 177, 168, 180, 188, 213,
    231,   223,  231,  215,  215, 221, 227, 233, 214, 231, 220, 222, 239, 223, 236, 236, 239, 264, 255, 226, 267, 344,
    350,   381,  457,  443,  446, 434, 526, 512, 546, 544, 530, 563, 568, 575, 633, 532, 552, 545, 578, 547, 511, 502,
    521,   499,  465,  520,  572, 588, 596, 513, 597, 582, 537, 490, 548, 516, 520, 523, 552, 562, 610, 567, 592, 624,
    631,   601,  699,  695,  804, 828, 929, 819, 841, 729, 631, 623, 490, 462, 454, 431, 423, 377, 393, 335, 369, 393,
    347,   334,  409,  413,  543, 521, 623, 588, 550, 356, 335, 274, 202, 184, 166, 158, 129, 146, 136, 126, 123, 117,
    117,   110,  87,   92,   101, 107, 115, 112, 133, 154, 158, 137, 160, 170, 154, 135, 141, 154, 179, 159, 157, 150,
    155,   127,  132,  163,  149, 168, 194, 204, 233, 255, 212, 225, 210, 208, 195, 163, 186, 124, 153, 126, 123, 138,
    120,   139,  92,   110,  96,  95,  95,  64,  86,  97,  81,  96,  109, 104, 98,  88,  89,  79,  72,  46,  46,  36,
    40,    36,   31,   26,   26,  30,  15,  16,  16,  14,  13,  12,  13,  6,   18,  9,   15,  16,  7,   11,  10,  10,
    8,     6,    6,    7,    5,   4,   0,   3,   2,   0,   1,   5,   0,   0};

inline Histogram256 sample_query_histogram() {
  Histogram256 h;
  for (int i = 0; i < 256; ++i) h.bins(i) = kSampleQueryHistogram[static_cast<std::size_t>(i)];
  h.total = h.bins.sum();
  return h;
}

/// Noise, piles, exact-percentage and two-point histograms.
inline Histogram256 random_histogram(Rng& rng) {
  Histogram256 h;
  switch (uniform_int(rng, 0, 3)) {
    case 0:  // broad noise
      for (int i = 0; i < 256; ++i) h.bins(i) = uniform_int(rng, 0, 1000);
      break;
    case 1: {  // mass piled into a few random windows
      const int piles = uniform_int(rng, 1, 3);
      for (int p = 0; p < piles; ++p) {
        const int lo = uniform_int(rng, 0, 255);
        const int hi = std::min(255, lo + uniform_int(rng, 0, 40));
        for (int i = lo; i <= hi; ++i) h.bins(i) += uniform_int(rng, 0, 500);
      }
      break;
    }
    case 2: {  // 100 pixels so percentages land exactly on the thresholds
      for (int i = 0; i < 100; ++i) {
        const int node = uniform_int(rng, 0, 7);
        h.bins(node * 32 + uniform_int(rng, 0, 31)) += 1;
      }
      break;
    }
    default: {  // two-point split at a threshold-sized fraction
      const int a = uniform_int(rng, 0, 255);
      const int b = uniform_int(rng, 0, 255);
      const int frac = uniform_int(rng, 50, 65);
      h.bins(a) += frac;
      h.bins(b) += 100 - frac;
    }
  }
  if (h.bins.sum() == 0) h.bins(uniform_int(rng, 0, 255)) = 1;
  h.total = h.bins.sum();
  return h;
}

/// Arbitrary but well-formed descriptors, no image behind them.
inline FeatureSet random_feature_set(Rng& rng) {
  FeatureSet f;
  for (int i = 0; i < 256; ++i) f.histogram.bins(i) = uniform_int(rng, 0, 20);
  f.histogram.bins(uniform_int(rng, 0, 255)) += 1;
  f.histogram.total = f.histogram.bins.sum();
  f.glcm = {uniform_real(rng, 1, 100), uniform_real(rng, 0, 1), uniform_real(rng, 0, 1000),
            uniform_real(rng, -1, 1), uniform_real(rng, 0, 1), uniform_real(rng, 0, 10)};
  f.gabor = Eigen::VectorXd::NullaryExpr(60, [&] { return uniform_real(rng, 0, 50); });
  f.tamura = TamuraVector::NullaryExpr([&] { return uniform_real(rng, 0, 100); });
  f.correlogram.values = Eigen::ArrayXXd::NullaryExpr(256, 4, [&] { return uniform_real(rng, 0, 1); });
  f.naive.points = decltype(f.naive.points)::NullaryExpr([&] { return uniform_real(rng, 0, 255); });
  f.major_regions = uniform_int(rng, 0, 6);
  f.range_key = assign_range(f.histogram);
  return f;
}

}  // namespace cbvr::test
