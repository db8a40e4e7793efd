#include "cbvr/engine.hpp"
#include "cbvr/http_api.hpp"
#include "support.hpp"

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <sstream>
#include <thread>

using namespace cbvr;
using namespace cbvr::test;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const fs::path& data_dir, const std::string& args) {
  const std::string cmd = "CBVR_DATA_DIR='" + data_dir.string() + "' '" CBVR_CLI_PATH "' " + args + " 2>&1";
  RunResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (const auto n = std::fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path write_frames(const fs::path& dir, Rng& rng, int n) {
  fs::create_directories(dir);
  for (int i = 0; i < n; ++i) {
    write_file(dir / ("frame" + std::to_string(i) + ".ppm"), encode_ppm(random_raster(rng, 24, 18, 4)));
  }
  return dir;
}

// Frame id column of the query table, in rank order.
std::vector<FrameId> table_ids(const std::string& output) {
  std::istringstream in(output);
  std::string line;
  std::getline(in, line);
  std::vector<FrameId> ids;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    int rank = 0;
    FrameId id = 0;
    if (fields >> rank >> id) ids.push_back(id);
  }
  return ids;
}

}  // namespace

TEST(Cli, IngestEmptyDirectoryFails) {
  TempDir dir;
  fs::create_directories(dir.path() / "empty");
  const auto r = run_cli(dir.path() / "db", "ingest clip " + (dir.path() / "empty").string());
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.output.find("EmptyVideo"), std::string::npos) << r.output;
}

TEST(Cli, QueryOnEmptyCatalogFails) {
  TempDir dir;
  write_file(dir.path() / "q.ppm", encode_ppm(Raster(8, 8)));
  const auto r = run_cli(dir.path() / "db", "query " + (dir.path() / "q.ppm").string());
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.output.find("EmptyCatalog"), std::string::npos) << r.output;
}

TEST(Cli, UsageErrors) {
  TempDir dir;
  EXPECT_NE(run_cli(dir.path() / "db", "").exit_code, 0);
  EXPECT_NE(run_cli(dir.path() / "db", "query").exit_code, 0);
  EXPECT_NE(run_cli(dir.path() / "db", "frobnicate").exit_code, 0);
  const auto r = run_cli(dir.path() / "db", "delete 7");
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.output.find("UnknownId"), std::string::npos) << r.output;
}

TEST(Cli, IngestListQueryEvalDelete) {
  TempDir dir;
  Rng rng(80);
  const auto db = dir.path() / "db";
  const auto frames = write_frames(dir.path() / "frames", rng, 4);

  auto r = run_cli(db, "ingest clip " + frames.string());
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(r.output, "v_id 1: 4 key frames from 4 frames\n");

  r = run_cli(db, "list");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(r.output.rfind("1\tclip\t4 key frames\t", 0), 0u) << r.output;
  EXPECT_EQ(run_cli(db, "list --name nothing").output, "");

  r = run_cli(db, "query " + (frames / "frame2.ppm").string() + " --k 3");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto header = r.output.substr(0, r.output.find('\n'));
  for (const char* col : {"rank", "frame", "video", "histogram", "glcm", "gabor", "tamura", "correlogram", "naive",
                          "regions", "combined"}) {
    EXPECT_NE(header.find(col), std::string::npos) << col;
  }
  const auto ids = table_ids(r.output);
  ASSERT_EQ(ids.size(), 3u);
  EXPECT_EQ(ids[0], 3);
  EXPECT_NE(r.output.find("clip/frame2.ppm"), std::string::npos);

  write_file(dir.path() / "labels.txt", Bytes{});
  {
    std::ofstream labels(dir.path() / "labels.txt");
    labels << "# query  relevant ids\nframes/frame2.ppm 3\n";
  }
  r = run_cli(db, "eval " + (dir.path() / "labels.txt").string() + " --ks 1,4");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  std::istringstream lines(r.output);
  std::string line;
  std::getline(lines, line);
  EXPECT_NE(line.find("Simple Region Growing"), std::string::npos);
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("Avg. prec.at 1 frames", 0), 0u);
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("Avg. prec.at 4 frames", 0), 0u);
  EXPECT_NE(line.find("0.250"), std::string::npos) << line;

  r = run_cli(db, "eval " + (dir.path() / "labels.txt").string() + " --ks 1 --csv");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(r.output.substr(0, r.output.find('\n')),
            "depth,GLCM,Gabor,Tamura,Histogram,Autocorrelation,Simple Region Growing,Combined");

  r = run_cli(db, "delete 1");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(run_cli(db, "list").output, "");
}

TEST(Cli, CorruptFrameNamesFile) {
  TempDir dir;
  Rng rng(81);
  const auto frames = write_frames(dir.path() / "frames", rng, 3);
  write_file(frames / "frame1.ppm", Bytes{'P', '6', '\n'});
  const auto r = run_cli(dir.path() / "db", "ingest clip " + frames.string());
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.output.find("CorruptImage"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("frame1.ppm"), std::string::npos) << r.output;
  EXPECT_EQ(run_cli(dir.path() / "db", "list").output, "");
}

TEST(Cli, RankingMatchesHttp) {
  TempDir dir;
  Rng rng(82);
  const auto db = dir.path() / "db";
  ASSERT_EQ(run_cli(db, "ingest a " + write_frames(dir.path() / "a", rng, 5).string()).exit_code, 0);
  ASSERT_EQ(run_cli(db, "ingest b " + write_frames(dir.path() / "b", rng, 5).string()).exit_code, 0);
  const auto query = dir.path() / "query.ppm";
  write_file(query, encode_ppm(random_raster(rng, 24, 18, 4)));

  const auto cli = run_cli(db, "query " + query.string() + " --k 10 --weights 1,2,0,0,1,0,1");
  ASSERT_EQ(cli.exit_code, 0) << cli.output;
  const auto cli_ids = table_ids(cli.output);
  ASSERT_EQ(cli_ids.size(), 10u);

  EngineConfig config;
  config.data_dir = db;
  Engine engine(config);
  HttpService service(engine, {});
  const int port = service.bind_to_any_port("127.0.0.1");
  std::thread server([&] { service.listen_after_bind(); });
  service.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  const auto bytes = read_file(query);
  httplib::MultipartFormDataItems items = {
      {"image", bytes, "query.ppm", ""}, {"k", "10", "", ""}, {"weights", "1,2,0,0,1,0,1", "", ""}};
  const auto res = client.Post("/api/search", items);
  service.stop();
  server.join();
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200) << res->body;
  std::vector<FrameId> http_ids;
  const auto body = nlohmann::json::parse(res->body);
  for (const auto& hit : body.at("results")) http_ids.push_back(hit.at("frameId"));
  EXPECT_EQ(http_ids, cli_ids);
}
