#include "cbvr/catalog.hpp"

#include "cbvr/error.hpp"
#include "cbvr/serialization.hpp"

#include <algorithm>
#include <charconv>
#include <ctime>
#include <fstream>
#include <iterator>
#include <sstream>

namespace cbvr {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kStagingPrefix = ".staging-";
constexpr std::string_view kTrashPrefix = ".trash-";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& p, std::string_view content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw Error(ErrorKind::Io, "short write to " + p.string());
}

void write_file(const fs::path& p, const Bytes& content) {
  write_file(p, std::string_view(reinterpret_cast<const char*>(content.data()), content.size()));
}

std::int64_t parse_int(std::string_view text, std::string_view field) {
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::Io, "catalog field '" + std::string(field) + "' is not an integer");
  }
  return v;
}

// "key value" lines; the value runs to end of line.
std::vector<std::pair<std::string, std::string>> parse_fields(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> fields;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    const auto space = line.find(' ');
    if (space == std::string_view::npos) {
      fields.emplace_back(std::string(line), std::string());
    } else {
      fields.emplace_back(std::string(line.substr(0, space)), std::string(line.substr(space + 1)));
    }
  }
  return fields;
}

const std::string& field(const std::vector<std::pair<std::string, std::string>>& fields, std::string_view key) {
  for (const auto& [k, v] : fields) {
    if (k == key) return v;
  }
  throw Error(ErrorKind::Io, "catalog record lacks field '" + std::string(key) + "'");
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void require_single_line(const std::string& text, std::string_view what) {
  if (text.find_first_of("\r\n") != std::string::npos) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " must not contain line breaks");
  }
}

std::string render_manifest(const VideoRecord& v) {
  std::string out = "v_id " + std::to_string(v.v_id) + "\n";
  out += "v_name " + v.v_name + "\n";
  out += "ingested_at " + v.ingested_at + "\n";
  for (const auto id : v.key_frames) out += "keyframe " + std::to_string(id) + "\n";
  return out;
}

VideoRecord parse_manifest(std::string_view text) {
  const auto fields = parse_fields(text);
  VideoRecord v;
  v.v_id = parse_int(field(fields, "v_id"), "v_id");
  v.v_name = field(fields, "v_name");
  v.ingested_at = field(fields, "ingested_at");
  for (const auto& [k, value] : fields) {
    if (k == "keyframe") v.key_frames.push_back(parse_int(value, "keyframe"));
  }
  return v;
}

KeyFrameRecord make_record(FrameId id, const KeyFrameInput& in, VideoId owner) {
  KeyFrameRecord r;
  r.i_id = id;
  r.i_name = in.name;
  r.image_path = std::to_string(id) + ".ppm";
  r.min = in.features.range_key.min;
  r.max = in.features.range_key.max;
  r.sch = serialize(in.features.histogram);
  r.glcm = serialize(in.features.glcm);
  r.gabor = serialize(in.features.gabor);
  r.tamura = serialize(in.features.tamura);
  r.acc = serialize(in.features.correlogram);
  r.naive = serialize(in.features.naive);
  r.major_regions = in.features.major_regions;
  r.v_id = owner;
  return r;
}

FeatureSet features_of(const KeyFrameRecord& r) {
  FeatureSet f;
  f.histogram = parse_histogram(r.sch);
  f.glcm = parse_glcm(r.glcm);
  f.gabor = parse_gabor(r.gabor);
  f.tamura = parse_tamura(r.tamura);
  f.correlogram = parse_correlogram(r.acc);
  f.naive = parse_naive(r.naive);
  f.major_regions = r.major_regions;
  f.range_key = {r.min, r.max};
  return f;
}

}  // namespace

std::string render_sidecar(const KeyFrameRecord& r) {
  std::ostringstream out;
  out << "i_id " << r.i_id << '\n'
      << "i_name " << r.i_name << '\n'
      << "v_id " << r.v_id << '\n'
      << "image " << r.image_path.string() << '\n'
      << "min " << r.min << '\n'
      << "max " << r.max << '\n'
      << "majorRegions " << r.major_regions << '\n'
      << "sch " << r.sch << '\n'
      << "glcm " << r.glcm << '\n'
      << "gabor " << r.gabor << '\n'
      << "tamura " << r.tamura << '\n'
      << "acc " << r.acc << '\n'
      << "naive " << r.naive << '\n';
  return out.str();
}

KeyFrameRecord parse_sidecar(std::string_view text) {
  const auto fields = parse_fields(text);
  KeyFrameRecord r;
  r.i_id = parse_int(field(fields, "i_id"), "i_id");
  r.i_name = field(fields, "i_name");
  r.v_id = parse_int(field(fields, "v_id"), "v_id");
  r.image_path = field(fields, "image");
  r.min = static_cast<int>(parse_int(field(fields, "min"), "min"));
  r.max = static_cast<int>(parse_int(field(fields, "max"), "max"));
  r.major_regions = static_cast<int>(parse_int(field(fields, "majorRegions"), "majorRegions"));
  r.sch = field(fields, "sch");
  r.glcm = field(fields, "glcm");
  r.gabor = field(fields, "gabor");
  r.tamura = field(fields, "tamura");
  r.acc = field(fields, "acc");
  r.naive = field(fields, "naive");
  return r;
}

std::vector<Candidate> CatalogSnapshot::candidates() const {
  std::vector<Candidate> out;
  out.reserve(frames.size());
  for (const auto& [id, frame] : frames) out.push_back({id, frame.features.get()});
  return out;
}

std::vector<Candidate> CatalogSnapshot::candidates(const std::set<FrameId>& ids) const {
  std::vector<Candidate> out;
  out.reserve(ids.size());
  for (const auto id : ids) {
    if (const auto it = frames.find(id); it != frames.end()) out.push_back({id, it->second.features.get()});
  }
  return out;
}

Catalog::Catalog(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "videos", ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create catalog at " + root_.string() + ": " + ec.message());
  load();
}

void Catalog::load() {
  auto snap = std::make_shared<CatalogSnapshot>();
  VideoId max_video = 0;
  FrameId max_frame = 0;

  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root_ / "videos")) {
    const auto name = entry.path().filename().string();
    if (name.starts_with(kStagingPrefix) || name.starts_with(kTrashPrefix)) {
      // Debris from an interrupted write.
      fs::remove_all(entry.path());
      continue;
    }
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  for (const auto& dir : dirs) {
    VideoRecord video = parse_manifest(read_file(dir / "manifest.txt"));
    video.frame_dir = fs::path("videos") / std::to_string(video.v_id);
    max_video = std::max(max_video, video.v_id);
    for (const auto id : video.key_frames) {
      KeyFrameRecord record = parse_sidecar(read_file(dir / (std::to_string(id) + ".features")));
      if (record.i_id != id || record.v_id != video.v_id) {
        throw Error(ErrorKind::Io, "sidecar " + std::to_string(id) + " does not belong to video " +
                                       std::to_string(video.v_id));
      }
      auto features = std::make_shared<const FeatureSet>(features_of(record));
      snap->buckets.insert(id, features->range_key);
      max_frame = std::max(max_frame, id);
      snap->frames.emplace(id, StoredFrame{std::move(record), std::move(features)});
    }
    snap->videos.emplace(video.v_id, std::move(video));
  }

  next_video_id_ = max_video + 1;
  next_frame_id_ = max_frame + 1;
  if (fs::exists(root_ / "catalog.state")) {
    const auto fields = parse_fields(read_file(root_ / "catalog.state"));
    next_video_id_ = std::max(next_video_id_, parse_int(field(fields, "next_video_id"), "next_video_id"));
    next_frame_id_ = std::max(next_frame_id_, parse_int(field(fields, "next_frame_id"), "next_frame_id"));
  }
  publish(std::move(snap));
}

std::shared_ptr<const CatalogSnapshot> Catalog::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

void Catalog::publish(std::shared_ptr<const CatalogSnapshot> next) {
  std::lock_guard lock(snapshot_mutex_);
  snapshot_ = std::move(next);
}

void Catalog::write_state(VideoId next_video, FrameId next_frame) const {
  const auto tmp = root_ / "catalog.state.tmp";
  write_file(tmp, "next_video_id " + std::to_string(next_video) + "\nnext_frame_id " + std::to_string(next_frame) + "\n");
  fs::rename(tmp, root_ / "catalog.state");
}

VideoId Catalog::put_video(const std::string& name, const std::vector<KeyFrameInput>& frames,
                           const std::function<void()>& before_commit) {
  if (name.empty()) throw Error(ErrorKind::NameRequired, "video name is empty");
  require_single_line(name, "video name");
  if (frames.empty()) throw Error(ErrorKind::EmptyVideo, "a video needs at least one key frame");
  for (const auto& f : frames) require_single_line(f.name, "frame name");

  std::lock_guard writer(write_mutex_);
  const VideoId vid = next_video_id_;
  FrameId fid = next_frame_id_;

  VideoRecord video;
  video.v_id = vid;
  video.v_name = name;
  video.frame_dir = fs::path("videos") / std::to_string(vid);
  video.ingested_at = utc_now();

  std::vector<StoredFrame> stored;
  for (const auto& f : frames) {
    const FrameId id = fid++;
    video.key_frames.push_back(id);
    stored.push_back({make_record(id, f, vid), std::make_shared<const FeatureSet>(f.features)});
  }

  const auto staging = root_ / "videos" / (std::string(kStagingPrefix) + std::to_string(vid));
  const auto final_dir = root_ / video.frame_dir;
  struct StagingGuard {
    fs::path dir;
    bool armed = true;
    ~StagingGuard() {
      if (!armed) return;
      std::error_code ec;
      fs::remove_all(dir, ec);
    }
  } guard{staging};

  fs::create_directories(staging);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& record = stored[i].record;
    write_file(staging / record.image_path, encode_ppm(frames[i].image));
    write_file(staging / (std::to_string(record.i_id) + ".features"), render_sidecar(record));
  }
  write_file(staging / "manifest.txt", render_manifest(video));
  if (before_commit) before_commit();

  fs::rename(staging, final_dir);
  guard.dir = final_dir;
  write_state(vid + 1, fid);
  guard.armed = false;
  next_video_id_ = vid + 1;
  next_frame_id_ = fid;

  auto next = std::make_shared<CatalogSnapshot>(*snapshot());
  for (auto& s : stored) {
    next->buckets.insert(s.record.i_id, s.features->range_key);
    next->frames.emplace(s.record.i_id, std::move(s));
  }
  next->videos.emplace(vid, std::move(video));
  publish(std::move(next));
  return vid;
}

VideoRecord Catalog::get_video(VideoId id) const {
  const auto snap = snapshot();
  const auto it = snap->videos.find(id);
  if (it == snap->videos.end()) throw Error(ErrorKind::UnknownId, "no video " + std::to_string(id));
  return it->second;
}

void Catalog::delete_video(VideoId id) {
  std::lock_guard writer(write_mutex_);
  const auto current = snapshot();
  const auto it = current->videos.find(id);
  if (it == current->videos.end()) throw Error(ErrorKind::UnknownId, "no video " + std::to_string(id));

  const auto trash = root_ / "videos" / (std::string(kTrashPrefix) + std::to_string(id));
  fs::rename(root_ / it->second.frame_dir, trash);
  std::error_code ec;
  fs::remove_all(trash, ec);

  auto next = std::make_shared<CatalogSnapshot>(*current);
  for (const auto fid : it->second.key_frames) {
    next->buckets.erase(fid);
    next->frames.erase(fid);
  }
  next->videos.erase(id);
  publish(std::move(next));
}

std::vector<VideoRecord> Catalog::list_videos() const {
  const auto snap = snapshot();
  std::vector<VideoRecord> out;
  for (const auto& [id, v] : snap->videos) out.push_back(v);
  return out;
}

std::vector<VideoRecord> Catalog::find_by_name(std::string_view substring) const {
  const auto snap = snapshot();
  std::vector<VideoRecord> out;
  for (const auto& [id, v] : snap->videos) {
    if (v.v_name.find(substring) != std::string::npos) out.push_back(v);
  }
  return out;
}

std::vector<KeyFrameRecord> Catalog::keyframes_of(VideoId id) const {
  const auto snap = snapshot();
  const auto it = snap->videos.find(id);
  if (it == snap->videos.end()) throw Error(ErrorKind::UnknownId, "no video " + std::to_string(id));
  std::vector<KeyFrameRecord> out;
  for (const auto fid : it->second.key_frames) out.push_back(snap->frames.at(fid).record);
  return out;
}

std::vector<KeyFrameRecord> Catalog::all_keyframes() const {
  const auto snap = snapshot();
  std::vector<KeyFrameRecord> out;
  for (const auto& [id, f] : snap->frames) out.push_back(f.record);
  return out;
}

KeyFrameRecord Catalog::get_keyframe(FrameId id) const {
  const auto snap = snapshot();
  const auto it = snap->frames.find(id);
  if (it == snap->frames.end()) throw Error(ErrorKind::UnknownId, "no key frame " + std::to_string(id));
  return it->second.record;
}

fs::path Catalog::image_file(FrameId id) const {
  const auto record = get_keyframe(id);
  return root_ / "videos" / std::to_string(record.v_id) / record.image_path;
}

}  // namespace cbvr
