#pragma once

#include "cbvr/imaging.hpp"

#include <Eigen/Core>

namespace cbvr {

/// Quantized-RGB histogram; same shape as the gray histogram.
using ColorHistogram = Histogram256;

inline constexpr int kColorBins = 256;
inline constexpr int kDefaultCorrelogramDistance = 4;

/// values(color, d - 1) for d in [1, maxDistance], each in [0, 1].
struct AutoCorrelogram {
  Eigen::ArrayXXd values;

  int max_distance() const noexcept { return static_cast<int>(values.cols()); }
  friend bool operator==(const AutoCorrelogram& a, const AutoCorrelogram& b) {
    return a.values.rows() == b.values.rows() && a.values.cols() == b.values.cols() &&
           (a.values == b.values).all();
  }
};

/// Mean colors of a 5x5 grid of sample windows, row-major (row = y).
struct NaiveSignature {
  static constexpr int kGrid = 5;
  static constexpr int kPoints = kGrid * kGrid;

  Eigen::Matrix<double, kPoints, 3, Eigen::RowMajor> points =
      Eigen::Matrix<double, kPoints, 3, Eigen::RowMajor>::Zero();

  friend bool operator==(const NaiveSignature& a, const NaiveSignature& b) { return a.points == b.points; }
};

/// 3-3-2 bit allocation: (r>>5)<<5 | (g>>5)<<2 | (b>>6).
constexpr int quantize_rgb(int r, int g, int b) noexcept { return ((r >> 5) << 5) | ((g >> 5) << 2) | (b >> 6); }

/// RGB -> HSV, then 16 hue x 4 saturation x 4 value levels:
/// bin = h*16 + s*4 + v. Undefined hue (gray) maps to h = 0.
int quantize_hsv(int r, int g, int b) noexcept;

ColorHistogram rgb_histogram(const Raster& r);

/// Per (quantized HSV color, distance d): number of same-colored pixels on
/// the Chebyshev ring of radius d around every pixel of that color.
/// Rings are truncated at the image border.
Eigen::Array<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> correlogram_counts(
    const Raster& r, int max_distance = kDefaultCorrelogramDistance);

/// Correlogram counts with each distance column divided by its maximum over
/// colors. A column with no mass stays zero.
AutoCorrelogram auto_correlogram(const Raster& r, int max_distance = kDefaultCorrelogramDistance);

NaiveSignature naive_signature(const Raster& r);

}  // namespace cbvr
