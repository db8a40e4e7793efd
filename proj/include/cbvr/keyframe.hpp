#pragma once

#include "cbvr/imaging.hpp"

#include <span>
#include <vector>

namespace cbvr {

/// Side length frames are rescaled to before they are compared.
inline constexpr int kComparisonSize = 300;
inline constexpr double kDefaultKeyframeThreshold = 800.0;

struct KeyFrameSelection {
  std::vector<std::size_t> kept_indices;
  double threshold = kDefaultKeyframeThreshold;
};

/// Euclidean distance over all RGB samples after nearest-neighbor rescaling
/// both frames to 300x300.
double frame_distance(const Raster& a, const Raster& b);

/// Incremental form of extract_keyframes for streaming ingestion: offer
/// frames in order; offer() reports whether the frame is kept.
class KeyFrameSweep {
 public:
  explicit KeyFrameSweep(double threshold = kDefaultKeyframeThreshold) : threshold_(threshold) {}

  bool offer(const Raster& frame);

 private:
  double threshold_;
  Eigen::Array<std::int32_t, Eigen::Dynamic, 1> anchor_;
};

/// Anchor-and-sweep: frame 0 is kept; later frames are dropped while they stay
/// within `threshold` of the current anchor, and the first frame beyond it
/// becomes the next anchor. Throws EmptySequence.
KeyFrameSelection extract_keyframes(std::span<const Raster> frames,
                                    double threshold = kDefaultKeyframeThreshold);

}  // namespace cbvr
