#pragma once

#include "cbvr/imaging.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace cbvr {

using FrameId = std::int64_t;
using VideoId = std::int64_t;

/// Intensity range node of the indexing tree: [0,255] splits into halves,
/// quarters and eighths.
struct RangeKey {
  int min = 0;
  int max = 255;

  int width() const noexcept { return max - min + 1; }
  bool contains(const RangeKey& other) const noexcept { return min <= other.min && other.max <= max; }
  /// The enclosing range one level up; the root is its own parent.
  RangeKey parent() const noexcept;
  bool is_tree_node() const noexcept;
  std::string to_string() const;

  friend auto operator<=>(const RangeKey&, const RangeKey&) = default;
};

inline constexpr RangeKey kRootRange{0, 255};

struct RangeThresholds {
  double first_level = 55.0;
  double deeper_levels = 60.0;
};

/// Descends the tree while a child half holds more than the level's
/// percentage of the total mass. Throws EmptyHistogram.
RangeKey assign_range(const Histogram256& h, const RangeThresholds& thresholds = {});

/// Frame ids grouped by range. A frame id lives in exactly one bucket.
class RangeBuckets {
 public:
  /// Throws DuplicateFrame.
  void insert(FrameId id, RangeKey key);
  /// Returns false when the id is not indexed.
  bool erase(FrameId id);

  std::size_t size() const noexcept { return key_of_.size(); }
  const std::map<RangeKey, std::set<FrameId>>& buckets() const noexcept { return buckets_; }

  /// Exact bucket first; while fewer than min_candidates ids are found, widen
  /// to the parent range and take every bucket it contains.
  std::set<FrameId> candidates(RangeKey query, std::size_t min_candidates) const;

  friend bool operator==(const RangeBuckets&, const RangeBuckets&) = default;

 private:
  std::map<RangeKey, std::set<FrameId>> buckets_;
  std::map<FrameId, RangeKey> key_of_;
};

}  // namespace cbvr
