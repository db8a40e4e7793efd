#include "cbvr/engine.hpp"

#include "cbvr/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace cbvr {

namespace fs = std::filesystem;

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

Bytes read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

namespace {

std::vector<std::string> split_commas(std::string_view text) {
  std::vector<std::string> parts;
  std::string current;
  for (const char c : text) {
    if (c == ',') {
      parts.push_back(std::move(current));
      current.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      current += c;
    }
  }
  parts.push_back(std::move(current));
  return parts;
}

double parse_weight(const std::string& token) {
  double v = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (token.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw Error(ErrorKind::InvalidArgument, "bad weight '" + token + "'");
  }
  return v;
}

}  // namespace

WeightProfile parse_weights(std::string_view text) {
  const auto parts = split_commas(text);
  std::array<double, kFeatureKinds> raw{};
  if (text.find('=') != std::string_view::npos) {
    for (const auto& part : parts) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::InvalidArgument, "expected name=weight, got '" + part + "'");
      const auto kind = feature_kind_from_string(part.substr(0, eq));
      if (!kind) throw Error(ErrorKind::InvalidArgument, "unknown feature '" + part.substr(0, eq) + "'");
      raw[static_cast<std::size_t>(*kind)] = parse_weight(part.substr(eq + 1));
    }
  } else {
    if (parts.size() != kFeatureKinds) {
      throw Error(ErrorKind::InvalidArgument, "expected 7 weights, got " + std::to_string(parts.size()));
    }
    for (std::size_t i = 0; i < kFeatureKinds; ++i) raw[i] = parse_weight(parts[i]);
  }
  return WeightProfile(raw);
}

std::vector<int> parse_depths(std::string_view text) {
  std::vector<int> ks;
  for (const auto& part : split_commas(text)) {
    int k = 0;
    const auto* end = part.data() + part.size();
    const auto [ptr, ec] = std::from_chars(part.data(), end, k);
    if (part.empty() || ec != std::errc() || ptr != end || k < 1) {
      throw Error(ErrorKind::InvalidArgument, "bad depth '" + part + "'");
    }
    ks.push_back(k);
  }
  return ks;
}

std::vector<LabelEntry> parse_labels(std::string_view text, const fs::path& base_dir) {
  std::vector<LabelEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string path;
    if (!(fields >> path)) continue;
    LabelEntry entry;
    entry.query_image = fs::path(path).is_absolute() ? fs::path(path) : base_dir / path;
    std::string token;
    while (fields >> token) {
      try {
        std::size_t used = 0;
        const long long id = std::stoll(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        entry.relevant.insert(id);
      } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidArgument,
                    "labels line " + std::to_string(line_no) + ": bad frame id '" + token + "'");
      }
    }
    out.push_back(std::move(entry));
  }
  return out;
}

Engine::Engine(EngineConfig config) : config_(std::move(config)), catalog_(config_.data_dir) {}

IngestReport Engine::ingest(const std::string& name, const std::vector<FrameSource>& frames) {
  if (name.empty()) throw Error(ErrorKind::NameRequired, "video name is empty");
  if (frames.empty()) throw Error(ErrorKind::EmptyVideo, "no frames supplied for '" + name + "'");

  IngestReport report;
  report.frames_in = frames.size();
  report.per_frame_ms.assign(frames.size(), 0.0);

  checkpoint(IngestStage::Decode);
  KeyFrameSweep sweep(config_.keyframe_threshold);
  std::vector<KeyFrameInput> kept;
  std::vector<std::size_t> kept_source;
  bool sweeping = false;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    std::optional<Raster> raster;
    try {
      raster = load_frame(frames[i].bytes);
    } catch (const Error& e) {
      throw Error(e.kind(), frames[i].name + ": " + e.detail());
    }
    if (!sweeping) {
      checkpoint(IngestStage::KeyFrames);
      sweeping = true;
    }
    if (sweep.offer(*raster)) {
      kept.push_back({frames[i].name, std::move(*raster), FeatureSet{}});
      kept_source.push_back(i);
    }
    report.per_frame_ms[i] += elapsed_ms(start);
  }

  checkpoint(IngestStage::Features);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    kept[k].features = extract_feature_set(kept[k].image, config_.extraction);
    report.per_frame_ms[kept_source[k]] += elapsed_ms(start);
  }

  checkpoint(IngestStage::RangeAssign);
  for (auto& k : kept) k.features.range_key = assign_range(k.features.histogram, config_.extraction.range_thresholds);

  report.v_id = catalog_.put_video(name, kept, [this] { checkpoint(IngestStage::Persist); });
  report.key_frames_kept = kept.size();
  return report;
}

IngestReport Engine::ingest_directory(const std::string& name, const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  if (files.empty()) throw Error(ErrorKind::EmptyVideo, "no frame files in " + dir.string());

  std::vector<FrameSource> sources;
  sources.reserve(files.size());
  for (const auto& f : files) sources.push_back({f.filename().string(), read_bytes(f)});
  return ingest(name, sources);
}

std::vector<SearchHit> Engine::search(const SearchRequest& request) const {
  if (catalog_.snapshot()->frames.empty()) throw Error(ErrorKind::EmptyCatalog, "the catalog has no key frames");
  const Raster query = load_frame(request.query_image);
  return search(extract_feature_set(query, config_.extraction), request.k, request.weights, request.exhaustive);
}

std::vector<SearchHit> Engine::search(const FeatureSet& query, std::size_t k, const WeightProfile& weights,
                                      bool exhaustive) const {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  const auto snap = catalog_.snapshot();
  if (snap->frames.empty()) throw Error(ErrorKind::EmptyCatalog, "the catalog has no key frames");

  const auto pool = exhaustive
                        ? snap->candidates()
                        : snap->candidates(snap->buckets.candidates(
                              query.range_key, std::max(k, config_.min_prefilter_candidates)));
  std::vector<SearchHit> hits;
  for (const auto& r : combined_rank(query, pool, weights, k)) {
    const auto& record = snap->frames.at(r.frame_id).record;
    hits.push_back({r, record.v_id, snap->videos.at(record.v_id).v_name, record.i_name});
  }
  return hits;
}

std::vector<SearchHit> Engine::search_by_frame(FrameId id, std::size_t k, const WeightProfile& weights,
                                               bool exhaustive) const {
  const auto snap = catalog_.snapshot();
  if (snap->frames.empty()) throw Error(ErrorKind::EmptyCatalog, "the catalog has no key frames");
  const auto it = snap->frames.find(id);
  if (it == snap->frames.end()) throw Error(ErrorKind::UnknownId, "no key frame " + std::to_string(id));
  return search(*it->second.features, k, weights, exhaustive);
}

PrecisionTable Engine::evaluate(const std::vector<LabelEntry>& labels, const std::vector<int>& ks) const {
  std::vector<LabeledImage> images;
  for (const auto& label : labels) {
    images.push_back({label.query_image.string(), read_bytes(label.query_image), label.relevant});
  }
  return evaluate(images, ks);
}

PrecisionTable Engine::evaluate(const std::vector<LabeledImage>& labels, const std::vector<int>& ks) const {
  if (labels.empty()) throw Error(ErrorKind::NoQueries, "no labeled queries");
  const auto snap = catalog_.snapshot();
  if (snap->frames.empty()) throw Error(ErrorKind::EmptyCatalog, "the catalog has no key frames");

  std::vector<LabeledQuery> queries;
  for (const auto& label : labels) {
    LabeledQuery q;
    q.name = label.name;
    try {
      q.features = extract_feature_set(load_frame(label.image), config_.extraction);
    } catch (const Error& e) {
      throw Error(e.kind(), label.name + ": " + e.detail());
    }
    q.relevant = label.relevant;
    queries.push_back(std::move(q));
  }
  const auto corpus = snap->candidates();
  return precision_report(corpus, queries, ks);
}

}  // namespace cbvr
