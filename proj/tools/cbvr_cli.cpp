#include "cbvr/engine.hpp"
#include "cbvr/error.hpp"
#include "cbvr/http_api.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>

namespace {

using namespace cbvr;

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Bytes read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void print_hits(const std::vector<SearchHit>& hits) {
  std::ostringstream out;
  out << std::left << std::setw(5) << "rank" << std::setw(8) << "frame" << std::setw(7) << "video";
  for (const auto kind : kAllFeatureKinds) out << std::right << std::setw(13) << to_string(kind);
  out << std::setw(13) << "combined" << "  name\n";
  out << std::fixed << std::setprecision(6);
  for (std::size_t i = 0; i < hits.size(); ++i) {
    const auto& h = hits[i];
    out << std::left << std::setw(5) << i + 1 << std::setw(8) << h.result.frame_id << std::setw(7) << h.v_id
        << std::right;
    for (const double d : h.result.per_feature) out << std::setw(13) << d;
    out << std::setw(13) << h.result.combined << "  " << h.video_name << '/' << h.frame_name << '\n';
  }
  std::cout << out.str();
}

std::string parse_host(const std::string& addr, int& port) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorKind::InvalidArgument, "--addr must be host:port");
  port = std::stoi(addr.substr(colon + 1));
  return addr.substr(0, colon);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Content-based video key-frame retrieval"};
  app.require_subcommand(1);

  std::string data_dir = env_or("CBVR_DATA_DIR", "cbvr-data");
  std::string admin_token = env_or("CBVR_ADMIN_TOKEN", "");
  double threshold = kDefaultKeyframeThreshold;
  app.add_option("--data-dir", data_dir, "catalog directory (env CBVR_DATA_DIR)");

  auto* ingest = app.add_subcommand("ingest", "ingest a directory of frames as one video");
  std::string video_name, frame_dir;
  ingest->add_option("name", video_name)->required();
  ingest->add_option("frameDir", frame_dir)->required();
  ingest->add_option("--threshold", threshold, "key-frame distance threshold");

  auto* query = app.add_subcommand("query", "rank stored key frames against an image");
  std::string query_image, weights_text;
  std::size_t k = 20;
  bool exhaustive = false;
  query->add_option("image", query_image)->required();
  query->add_option("--k", k)->check(CLI::PositiveNumber);
  query->add_option("--weights", weights_text, "w1,...,w7 or name=w,...");
  query->add_flag("--exhaustive", exhaustive, "skip the range prefilter");

  auto* del = app.add_subcommand("delete", "remove a video and its key frames");
  VideoId v_id = 0;
  del->add_option("v_id", v_id)->required();

  auto* list = app.add_subcommand("list", "list stored videos");
  std::string name_filter;
  list->add_option("--name", name_filter, "substring filter");

  auto* eval = app.add_subcommand("eval", "precision report for a labels file");
  std::string labels_file, ks_text = "20,30,50,100";
  bool csv = false;
  eval->add_option("labels", labels_file)->required();
  eval->add_option("--ks", ks_text);
  eval->add_flag("--csv", csv);

  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  std::string addr = "127.0.0.1:8080";
  serve->add_option("--addr", addr, "host:port");
  serve->add_option("--data-dir", data_dir, "catalog directory (env CBVR_DATA_DIR)");
  serve->add_option("--admin-token", admin_token, "shared secret (env CBVR_ADMIN_TOKEN)");

  CLI11_PARSE(app, argc, argv);

  try {
    EngineConfig config;
    config.data_dir = data_dir;
    config.keyframe_threshold = threshold;
    Engine engine(config);

    if (*ingest) {
      const auto report = engine.ingest_directory(video_name, frame_dir);
      std::cout << "v_id " << report.v_id << ": " << report.key_frames_kept << " key frames from "
                << report.frames_in << " frames\n";
    } else if (*query) {
      SearchRequest req;
      req.query_image = read_bytes(query_image);
      req.k = k;
      if (!weights_text.empty()) req.weights = parse_weights(weights_text);
      req.exhaustive = exhaustive;
      print_hits(engine.search(req));
    } else if (*del) {
      engine.delete_video(v_id);
      std::cout << "deleted " << v_id << '\n';
    } else if (*list) {
      const auto videos = name_filter.empty() ? engine.catalog().list_videos() : engine.catalog().find_by_name(name_filter);
      for (const auto& v : videos) {
        std::cout << v.v_id << '\t' << v.v_name << '\t' << v.key_frames.size() << " key frames\t" << v.ingested_at
                  << '\n';
      }
    } else if (*eval) {
      const std::filesystem::path path = labels_file;
      const auto table = engine.evaluate(parse_labels(read_text(path), path.parent_path()), parse_depths(ks_text));
      std::cout << (csv ? table.to_csv() : table.to_text());
    } else if (*serve) {
      int port = 0;
      const auto host = parse_host(addr, port);
      HttpService service(engine, {admin_token});
      std::cerr << "listening on " << host << ':' << port << '\n';
      if (!service.listen(host, port)) throw Error(ErrorKind::Io, "cannot listen on " + addr);
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "Error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
