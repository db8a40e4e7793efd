#include "cbvr/keyframe.hpp"

#include "cbvr/error.hpp"

#include <cmath>

namespace cbvr {

namespace {

using Samples = Eigen::Array<std::int32_t, Eigen::Dynamic, 1>;

Samples comparison_samples(const Raster& r) {
  const Raster scaled = rescale(r, kComparisonSize, kComparisonSize);
  const Eigen::Index n = static_cast<Eigen::Index>(kComparisonSize) * kComparisonSize;
  Samples out(3 * n);
  for (int c = 0; c < 3; ++c) {
    out.segment(c * n, n) = scaled.channel(c).reshaped<Eigen::RowMajor>().cast<std::int32_t>();
  }
  return out;
}

double sample_distance(const Samples& a, const Samples& b) {
  // Each squared difference is at most 255^2 and there are 270000 of them.
  const std::int64_t sum = (a - b).square().cast<std::int64_t>().sum();
  return std::sqrt(static_cast<double>(sum));
}

}  // namespace

double frame_distance(const Raster& a, const Raster& b) {
  return sample_distance(comparison_samples(a), comparison_samples(b));
}

bool KeyFrameSweep::offer(const Raster& frame) {
  Samples samples = comparison_samples(frame);
  if (anchor_.size() != 0 && sample_distance(anchor_, samples) <= threshold_) return false;
  anchor_ = std::move(samples);
  return true;
}

KeyFrameSelection extract_keyframes(std::span<const Raster> frames, double threshold) {
  if (frames.empty()) throw Error(ErrorKind::EmptySequence, "no frames to extract key frames from");

  KeyFrameSelection selection;
  selection.threshold = threshold;
  KeyFrameSweep sweep(threshold);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (sweep.offer(frames[i])) selection.kept_indices.push_back(i);
  }
  return selection;
}

}  // namespace cbvr
