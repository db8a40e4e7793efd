#pragma once

#include "cbvr/catalog.hpp"
#include "cbvr/keyframe.hpp"
#include "cbvr/retrieval.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace cbvr {

struct EngineConfig {
  std::filesystem::path data_dir = "cbvr-data";
  double keyframe_threshold = kDefaultKeyframeThreshold;
  ExtractionOptions extraction;
  /// Lower bound on the candidate pool the range prefilter must produce.
  std::size_t min_prefilter_candidates = 50;
};

/// Ingestion pipeline stages, in order.
enum class IngestStage { Decode, KeyFrames, Features, RangeAssign, Persist };

struct FrameSource {
  std::string name;
  Bytes bytes;
};

struct IngestReport {
  VideoId v_id = 0;
  std::size_t frames_in = 0;
  std::size_t key_frames_kept = 0;
  /// Wall time spent on each input frame (decode, sweep, extraction).
  std::vector<double> per_frame_ms;
};

struct SearchRequest {
  Bytes query_image;
  std::size_t k = 20;
  WeightProfile weights;
  bool exhaustive = false;
};

struct SearchHit {
  RankedResult result;
  VideoId v_id = 0;
  std::string video_name;
  std::string frame_name;
};

/// One line of a labels file: a query image and the frame ids relevant to it.
struct LabelEntry {
  std::filesystem::path query_image;
  std::set<FrameId> relevant;
};

/// "<image path> <id> <id> ..." per line; '#' comments and blank lines are
/// skipped; relative paths resolve against base_dir.
std::vector<LabelEntry> parse_labels(std::string_view text, const std::filesystem::path& base_dir);

/// "w1,...,w7" in histogram, glcm, gabor, tamura, correlogram, naive, regions
/// order, or "name=w,..." with unnamed features at 0. Throws InvalidArgument.
WeightProfile parse_weights(std::string_view text);
/// "20,30,50,100". Throws InvalidArgument.
std::vector<int> parse_depths(std::string_view text);

/// A labeled query whose image is already in memory.
struct LabeledImage {
  std::string name;
  Bytes image;
  std::set<FrameId> relevant;
};

/// Shared core behind the CLI and the HTTP API.
class Engine {
 public:
  explicit Engine(EngineConfig config);

  const EngineConfig& config() const noexcept { return config_; }
  Catalog& catalog() noexcept { return catalog_; }
  const Catalog& catalog() const noexcept { return catalog_; }

  /// Frames are processed in the given order. All-or-nothing: throws
  /// EmptyVideo, NameRequired, CorruptImage (naming the file) and leaves the
  /// catalog untouched on any failure.
  IngestReport ingest(const std::string& name, const std::vector<FrameSource>& frames);
  /// Reads every regular file of `dir` in lexicographic filename order.
  IngestReport ingest_directory(const std::string& name, const std::filesystem::path& dir);

  /// Throws EmptyCatalog, CorruptImage.
  std::vector<SearchHit> search(const SearchRequest& request) const;
  std::vector<SearchHit> search(const FeatureSet& query, std::size_t k, const WeightProfile& weights,
                                bool exhaustive) const;
  /// Uses the stored features of a catalog frame as the query. Throws UnknownId.
  std::vector<SearchHit> search_by_frame(FrameId id, std::size_t k, const WeightProfile& weights,
                                         bool exhaustive) const;

  PrecisionTable evaluate(const std::vector<LabelEntry>& labels,
                          const std::vector<int>& ks = kDefaultPrecisionDepths) const;
  PrecisionTable evaluate(const std::vector<LabeledImage>& labels,
                          const std::vector<int>& ks = kDefaultPrecisionDepths) const;

  void delete_video(VideoId id) { catalog_.delete_video(id); }

  /// Called on entry to every ingest stage; a throw aborts the ingest.
  void set_fault_injector(std::function<void(IngestStage)> injector) { fault_injector_ = std::move(injector); }

 private:
  void checkpoint(IngestStage stage) const {
    if (fault_injector_) fault_injector_(stage);
  }

  EngineConfig config_;
  Catalog catalog_;
  std::function<void(IngestStage)> fault_injector_;
};

}  // namespace cbvr
