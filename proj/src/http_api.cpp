#include "cbvr/http_api.hpp"

#include "cbvr/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>

namespace cbvr {

using nlohmann::json;

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Unauthorized: return 401;
    case ErrorKind::UnknownId: return 404;
    case ErrorKind::DuplicateFrame:
    case ErrorKind::EmptyCatalog: return 409;
    case ErrorKind::Io: return 500;
    default: return 400;
  }
}

namespace {

json to_json(const IngestReport& r) {
  return {{"v_id", r.v_id},
          {"framesIn", r.frames_in},
          {"keyFramesKept", r.key_frames_kept},
          {"perFrameTimings", r.per_frame_ms}};
}

json to_json(const VideoRecord& v) {
  return {{"v_id", v.v_id},
          {"v_name", v.v_name},
          {"ingestedAt", v.ingested_at},
          {"frameCount", v.key_frames.size()},
          {"keyFrames", v.key_frames}};
}

json to_json(const SearchHit& h, std::size_t rank) {
  json distances = json::object();
  for (const auto kind : kAllFeatureKinds) {
    distances[std::string(to_string(kind))] = h.result.per_feature[static_cast<std::size_t>(kind)];
  }
  return {{"rank", rank},
          {"frameId", h.result.frame_id},
          {"v_id", h.v_id},
          {"videoName", h.video_name},
          {"frameName", h.frame_name},
          {"combined", h.result.combined},
          {"distances", distances},
          {"image", "/api/frames/" + std::to_string(h.result.frame_id) + "/image"}};
}

json to_json(const std::vector<SearchHit>& hits) {
  json results = json::array();
  for (std::size_t i = 0; i < hits.size(); ++i) results.push_back(to_json(hits[i], i + 1));
  return {{"results", results}};
}

json to_json(const PrecisionTable& t) {
  json methods = json::array();
  for (std::size_t m = 0; m < kEvalMethods; ++m) methods.push_back(column_title(static_cast<EvalMethod>(m)));
  json rows = json::array();
  for (Eigen::Index i = 0; i < t.mean_precision.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index m = 0; m < t.mean_precision.cols(); ++m) row.push_back(t.mean_precision(i, m));
    rows.push_back(row);
  }
  return {{"ks", t.ks}, {"methods", methods}, {"meanPrecision", rows}, {"text", t.to_text()}};
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view kind, const std::string& message) {
  send_json(res, {{"error", kind}, {"message", message}}, status);
}

template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const Error& e) {
      send_error(res, http_status(e.kind()), to_string(e.kind()), e.detail());
    } catch (const std::exception& e) {
      send_error(res, 500, "Internal", e.what());
    }
  };
}

std::int64_t parse_id(const std::string& text) {
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) throw Error(ErrorKind::InvalidArgument, "bad id '" + text + "'");
  return v;
}

// Form field from a multipart body or the query string.
std::optional<std::string> field(const httplib::Request& req, const std::string& name) {
  if (req.has_file(name)) return req.get_file_value(name).content;
  if (req.has_param(name)) return req.get_param_value(name);
  return std::nullopt;
}

struct SearchParams {
  std::size_t k = 20;
  WeightProfile weights;
  bool exhaustive = false;
};

SearchParams search_params(const httplib::Request& req) {
  SearchParams p;
  if (const auto k = field(req, "k")) {
    const auto v = parse_id(*k);
    if (v < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
    p.k = static_cast<std::size_t>(v);
  }
  if (const auto w = field(req, "weights")) p.weights = parse_weights(*w);
  if (const auto e = field(req, "exhaustive")) p.exhaustive = (*e == "1" || *e == "true" || *e == "on");
  return p;
}

std::vector<int> depths(const httplib::Request& req) {
  const auto ks = field(req, "ks");
  return ks ? parse_depths(*ks) : kDefaultPrecisionDepths;
}

Bytes to_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

}  // namespace

struct HttpService::Impl {
  Engine& engine;
  HttpOptions options;
  httplib::Server server;

  Impl(Engine& e, HttpOptions o) : engine(e), options(std::move(o)) {}

  void require_admin(const httplib::Request& req) const {
    if (!req.has_header(kAdminTokenHeader)) throw Error(ErrorKind::Unauthorized, "missing admin token");
    if (options.admin_token.empty() || req.get_header_value(kAdminTokenHeader) != options.admin_token) {
      throw Error(ErrorKind::Unauthorized, "admin token rejected");
    }
  }

  void routes() {
    server.Post("/api/videos", guarded([this](const httplib::Request& req, httplib::Response& res) {
      require_admin(req);
      const auto name = field(req, "name");
      if (!name || name->empty()) throw Error(ErrorKind::NameRequired, "form field 'name' is required");
      auto parts = req.get_file_values("frames");
      std::stable_sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.filename < b.filename; });
      std::vector<FrameSource> frames;
      for (const auto& part : parts) frames.push_back({part.filename, to_bytes(part.content)});
      send_json(res, to_json(engine.ingest(*name, frames)), 201);
    }));

    server.Delete(R"(/api/videos/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      require_admin(req);
      const auto id = parse_id(req.matches[1]);
      engine.delete_video(id);
      send_json(res, {{"deleted", id}});
    }));

    server.Get("/api/videos", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto videos = req.has_param("name") ? engine.catalog().find_by_name(req.get_param_value("name"))
                                                : engine.catalog().list_videos();
      json list = json::array();
      for (const auto& v : videos) list.push_back(to_json(v));
      send_json(res, {{"videos", list}});
    }));

    server.Get("/api/search", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto p = search_params(req);
      const auto frame = field(req, "frame");
      if (!frame) throw Error(ErrorKind::InvalidArgument, "GET /api/search needs frame=<id>; upload images with POST");
      if (engine.catalog().snapshot()->frames.empty()) throw Error(ErrorKind::EmptyCatalog, "the catalog has no key frames");
      send_json(res, to_json(engine.search_by_frame(parse_id(*frame), p.k, p.weights, p.exhaustive)));
    }));

    server.Post("/api/search", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto p = search_params(req);
      if (!req.has_file("image")) {
        const auto frame = field(req, "frame");
        if (!frame) throw Error(ErrorKind::InvalidArgument, "multipart field 'image' is required");
        send_json(res, to_json(engine.search_by_frame(parse_id(*frame), p.k, p.weights, p.exhaustive)));
        return;
      }
      SearchRequest request;
      request.query_image = to_bytes(req.get_file_value("image").content);
      request.k = p.k;
      request.weights = p.weights;
      request.exhaustive = p.exhaustive;
      send_json(res, to_json(engine.search(request)));
    }));

    server.Get(R"(/api/frames/([^/]+)/image)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto path = engine.catalog().image_file(parse_id(req.matches[1]));
      std::ifstream in(path, std::ios::binary);
      if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
      res.set_content(std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()),
                      "image/x-portable-pixmap");
    }));

    server.Get("/api/eval", guarded([this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_param("labels")) throw Error(ErrorKind::InvalidArgument, "query parameter 'labels' is required");
      const std::filesystem::path path = req.get_param_value("labels");
      std::ifstream in(path);
      if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read labels file " + path.string());
      const std::string text(std::istreambuf_iterator<char>(in), {});
      send_json(res, to_json(engine.evaluate(parse_labels(text, path.parent_path()), depths(req))));
    }));

    server.Post("/api/eval", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto text = field(req, "labels");
      if (!text) throw Error(ErrorKind::InvalidArgument, "field 'labels' is required");
      std::map<std::string, std::string> uploads;
      for (const auto& part : req.get_file_values("queries")) uploads[part.filename] = part.content;
      std::vector<LabeledImage> labeled;
      for (const auto& entry : parse_labels(*text, {})) {
        const auto name = entry.query_image.string();
        const auto it = uploads.find(name);
        if (it == uploads.end()) throw Error(ErrorKind::InvalidArgument, "no uploaded query named '" + name + "'");
        labeled.push_back({name, to_bytes(it->second), entry.relevant});
      }
      send_json(res, to_json(engine.evaluate(labeled, depths(req))));
    }));
  }
};

HttpService::HttpService(Engine& engine, HttpOptions options)
    : impl_(std::make_unique<Impl>(engine, std::move(options))) {
  const auto threads = impl_->options.thread_count;
  impl_->server.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  impl_->server.set_payload_max_length(std::size_t{1} << 30);
  impl_->routes();
}

HttpService::~HttpService() { stop(); }

bool HttpService::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int HttpService::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpService::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpService::stop() { impl_->server.stop(); }

void HttpService::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace cbvr
