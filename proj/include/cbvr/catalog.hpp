#pragma once

#include "cbvr/imaging.hpp"
#include "cbvr/range_index.hpp"
#include "cbvr/retrieval.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace cbvr {

struct VideoRecord {
  VideoId v_id = 0;
  std::string v_name;
  std::filesystem::path frame_dir;
  std::string ingested_at;  // UTC, ISO 8601
  std::vector<FrameId> key_frames;

  friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

struct KeyFrameRecord {
  FrameId i_id = 0;
  std::string i_name;
  std::filesystem::path image_path;
  int min = 0;
  int max = 255;
  std::string sch;
  std::string glcm;
  std::string gabor;
  std::string tamura;
  std::string acc;
  std::string naive;
  int major_regions = 0;
  VideoId v_id = 0;

  friend bool operator==(const KeyFrameRecord&, const KeyFrameRecord&) = default;
};

struct KeyFrameInput {
  std::string name;
  Raster image;
  FeatureSet features;
};

struct StoredFrame {
  KeyFrameRecord record;
  std::shared_ptr<const FeatureSet> features;
};

/// Immutable view of the catalog at one version.
struct CatalogSnapshot {
  std::map<VideoId, VideoRecord> videos;
  std::map<FrameId, StoredFrame> frames;
  RangeBuckets buckets;

  std::vector<Candidate> candidates() const;
  std::vector<Candidate> candidates(const std::set<FrameId>& ids) const;
};

/// Sidecar text for one key frame: "field value" lines, feature lines last.
std::string render_sidecar(const KeyFrameRecord& record);
KeyFrameRecord parse_sidecar(std::string_view text);

/// Directory-backed store of videos and their key frames:
///
///   <root>/catalog.state                 next id counters
///   <root>/videos/<v_id>/manifest.txt    video row + ordered key frame ids
///   <root>/videos/<v_id>/<i_id>.ppm      key frame image
///   <root>/videos/<v_id>/<i_id>.features key frame row (sidecar)
///
/// Writers are serialized. Each write builds the new video directory under a
/// hidden staging name and renames it into place, so a failed or interrupted
/// put leaves nothing visible. Readers work on snapshots.
class Catalog {
 public:
  /// Creates the directory layout if missing and loads existing content.
  explicit Catalog(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::shared_ptr<const CatalogSnapshot> snapshot() const;

  /// `before_commit` runs after every file is staged and before the rename;
  /// an exception from it aborts the put. Throws NameRequired, EmptyVideo.
  VideoId put_video(const std::string& name, const std::vector<KeyFrameInput>& frames,
                    const std::function<void()>& before_commit = {});
  /// Throws UnknownId.
  VideoRecord get_video(VideoId id) const;
  void delete_video(VideoId id);
  std::vector<VideoRecord> list_videos() const;
  std::vector<VideoRecord> find_by_name(std::string_view substring) const;
  std::vector<KeyFrameRecord> keyframes_of(VideoId id) const;
  std::vector<KeyFrameRecord> all_keyframes() const;
  KeyFrameRecord get_keyframe(FrameId id) const;
  std::filesystem::path image_file(FrameId id) const;

 private:
  void load();
  void publish(std::shared_ptr<const CatalogSnapshot> next);
  void write_state(VideoId next_video, FrameId next_frame) const;

  std::filesystem::path root_;
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const CatalogSnapshot> snapshot_;
  std::mutex write_mutex_;
  VideoId next_video_id_ = 1;
  FrameId next_frame_id_ = 1;
};

}  // namespace cbvr
