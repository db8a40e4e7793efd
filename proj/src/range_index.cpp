#include "cbvr/range_index.hpp"

#include "cbvr/error.hpp"

namespace cbvr {

RangeKey RangeKey::parent() const noexcept {
  if (width() >= 256) return kRootRange;
  const int w = width() * 2;
  const int lo = min / w * w;
  return {lo, lo + w - 1};
}

bool RangeKey::is_tree_node() const noexcept {
  const int w = width();
  return (w == 256 || w == 128 || w == 64 || w == 32) && min >= 0 && max <= 255 && min % w == 0;
}

std::string RangeKey::to_string() const { return "(" + std::to_string(min) + "," + std::to_string(max) + ")"; }

RangeKey assign_range(const Histogram256& h, const RangeThresholds& thresholds) {
  if (h.total <= 0) throw Error(ErrorKind::EmptyHistogram, "histogram has no mass");
  const double total = static_cast<double>(h.total);
  auto percent = [&](int lo, int hi) { return 100.0 * static_cast<double>(h.bins.segment(lo, hi - lo + 1).sum()) / total; };

  RangeKey key = percent(0, 127) > thresholds.first_level ? RangeKey{0, 127} : RangeKey{128, 255};
  for (int level = 2; level <= 3; ++level) {
    const int mid = key.min + key.width() / 2 - 1;
    if (percent(key.min, mid) > thresholds.deeper_levels) {
      key = {key.min, mid};
    } else if (percent(mid + 1, key.max) > thresholds.deeper_levels) {
      key = {mid + 1, key.max};
    } else {
      break;
    }
  }
  return key;
}

void RangeBuckets::insert(FrameId id, RangeKey key) {
  if (!key_of_.emplace(id, key).second) {
    throw Error(ErrorKind::DuplicateFrame, "frame " + std::to_string(id) + " is already indexed");
  }
  buckets_[key].insert(id);
}

bool RangeBuckets::erase(FrameId id) {
  const auto it = key_of_.find(id);
  if (it == key_of_.end()) return false;
  auto bucket = buckets_.find(it->second);
  bucket->second.erase(id);
  if (bucket->second.empty()) buckets_.erase(bucket);
  key_of_.erase(it);
  return true;
}

std::set<FrameId> RangeBuckets::candidates(RangeKey query, std::size_t min_candidates) const {
  std::set<FrameId> out;
  if (const auto it = buckets_.find(query); it != buckets_.end()) out = it->second;
  RangeKey scope = query;
  while (out.size() < min_candidates && scope != kRootRange) {
    scope = scope.parent();
    for (const auto& [key, ids] : buckets_) {
      if (scope.contains(key)) out.insert(ids.begin(), ids.end());
    }
  }
  return out;
}

}  // namespace cbvr
