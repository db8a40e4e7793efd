#pragma once

#include "cbvr/imaging.hpp"

#include <Eigen/Core>

#include <vector>

namespace cbvr {

/// 5x5 structuring element with the centered 3x3 block set.
struct MorphKernel {
  Eigen::Matrix<std::uint8_t, 5, 5> mask;

  static MorphKernel centered_square();
};

struct RegionLabeling {
  Plane<std::int32_t> labels;  // 1..number_of_regions
  int number_of_regions = 0;
  int num_holes = 0;
  std::vector<std::int64_t> region_sizes;  // region_sizes[id - 1]
};

inline constexpr double kDefaultMajorRegionFraction = 0.05;

/// Minimum-fuzziness threshold (Huang & Wang, Shannon entropy form) over the
/// gray histogram. Candidates run from the darkest to one below the brightest
/// occupied level; ties go to the lowest. A single-level histogram returns
/// that level.
int fuzziness_threshold(const Histogram256& h);

/// Pixels above the minimum-fuzziness threshold become 1.
BinaryRaster binarize(const GrayRaster& g);

/// Out-of-image kernel taps are ignored, so dilation pads with 0 and erosion
/// pads with 1.
BinaryRaster dilate(const BinaryRaster& b, const MorphKernel& k);
BinaryRaster erode(const BinaryRaster& b, const MorphKernel& k);

/// dilate, erode, erode, dilate.
BinaryRaster morph_close_open(const BinaryRaster& b, const MorphKernel& k = MorphKernel::centered_square());

/// Row-major seeding, 8-connected growth over equal values. Regions of value
/// 0 are counted as holes.
RegionLabeling grow_regions(const BinaryRaster& b);

/// Regions covering at least min_fraction of the image.
int major_regions(const RegionLabeling& l, double min_fraction = kDefaultMajorRegionFraction);

/// binarize -> morph_close_open -> grow_regions -> major_regions.
int count_major_regions(const GrayRaster& g, double min_fraction = kDefaultMajorRegionFraction);

}  // namespace cbvr
