#include "cbvr/engine.hpp"
#include "cbvr/http_api.hpp"
#include "support.hpp"

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include <thread>

using namespace cbvr;
using namespace cbvr::test;
using nlohmann::json;

namespace {

constexpr const char* kToken = "s3cret";

class HttpApi : public ::testing::Test {
 protected:
  void SetUp() override {
    EngineConfig config;
    config.data_dir = dir.path() / "catalog";
    engine = std::make_unique<Engine>(config);
    service = std::make_unique<HttpService>(*engine, HttpOptions{kToken, 4});
    port = service->bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    thread = std::thread([this] { service->listen_after_bind(); });
    service->wait_until_ready();
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    client->set_read_timeout(60, 0);
  }

  void TearDown() override {
    service->stop();
    thread.join();
  }

  httplib::Result upload(const std::string& name, const std::vector<FrameSource>& frames,
                         const std::string& token = kToken) {
    httplib::MultipartFormDataItems items = {{"name", name, "", ""}};
    for (const auto& f : frames) items.push_back({"frames", std::string(f.bytes.begin(), f.bytes.end()), f.name, "image/x-portable-pixmap"});
    httplib::Headers headers;
    if (!token.empty()) headers.emplace(kAdminTokenHeader, token);
    return client->Post("/api/videos", headers, items);
  }

  httplib::Result search_image(const Bytes& image, const std::string& extra_k = "5") {
    httplib::MultipartFormDataItems items = {{"image", std::string(image.begin(), image.end()), "q.ppm", ""},
                                             {"k", extra_k, "", ""}};
    return client->Post("/api/search", items);
  }

  TempDir dir;
  std::unique_ptr<Engine> engine;
  std::unique_ptr<HttpService> service;
  std::unique_ptr<httplib::Client> client;
  std::thread thread;
  int port = 0;
};

std::vector<FrameSource> distinct_frames(Rng& rng, int n) {
  std::vector<FrameSource> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({"f" + std::to_string(i) + ".ppm", encode_ppm(random_raster(rng, 24, 18, 4))});
  }
  return out;
}

void expect_error(const httplib::Result& res, int status, const std::string& kind) {
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, status) << res->body;
  const auto body = json::parse(res->body);
  EXPECT_EQ(body.at("error"), kind) << res->body;
  EXPECT_TRUE(body.at("message").is_string());
}

}  // namespace

TEST(HttpStatus, Mapping) {
  EXPECT_EQ(http_status(ErrorKind::UnknownId), 404);
  EXPECT_EQ(http_status(ErrorKind::DuplicateFrame), 409);
  EXPECT_EQ(http_status(ErrorKind::EmptyCatalog), 409);
  EXPECT_EQ(http_status(ErrorKind::Unauthorized), 401);
  EXPECT_EQ(http_status(ErrorKind::CorruptImage), 400);
  EXPECT_EQ(http_status(ErrorKind::MalformedFeatureString), 400);
  EXPECT_EQ(http_status(ErrorKind::Io), 500);
}

TEST_F(HttpApi, EmptyCatalogSearchIs409) {
  expect_error(search_image(encode_ppm(Raster(8, 8))), 409, "EmptyCatalog");
  expect_error(client->Get("/api/search?frame=1"), 409, "EmptyCatalog");
}

TEST_F(HttpApi, DeleteUnknownIs404) {
  expect_error(client->Delete("/api/videos/42", {{kAdminTokenHeader, kToken}}), 404, "UnknownId");
}

TEST_F(HttpApi, AdminRoutesNeedToken) {
  Rng rng(70);
  expect_error(upload("v", distinct_frames(rng, 1), ""), 401, "Unauthorized");
  expect_error(upload("v", distinct_frames(rng, 1), "wrong"), 401, "Unauthorized");
  expect_error(client->Delete("/api/videos/1"), 401, "Unauthorized");
  EXPECT_TRUE(engine->catalog().list_videos().empty());
}

TEST_F(HttpApi, UploadWithoutFramesIsEmptyVideo) {
  expect_error(upload("v", {}), 400, "EmptyVideo");
  expect_error(upload("", {}), 400, "NameRequired");
}

TEST_F(HttpApi, CorruptUploadIs400AndStoresNothing) {
  Rng rng(71);
  auto frames = distinct_frames(rng, 3);
  frames[1].bytes = Bytes{'P', '6', '\n', '1'};
  const auto res = upload("v", frames);
  expect_error(res, 400, "CorruptImage");
  EXPECT_NE(res->body.find("f1.ppm"), std::string::npos);
  EXPECT_TRUE(engine->catalog().list_videos().empty());
}

TEST_F(HttpApi, IngestListSearchDelete) {
  Rng rng(72);
  auto frames = distinct_frames(rng, 4);
  // Upload order must not matter; parts are ordered by filename.
  std::swap(frames[0], frames[3]);
  const auto up = upload("clip one", frames);
  ASSERT_TRUE(up);
  ASSERT_EQ(up->status, 201) << up->body;
  const auto report = json::parse(up->body);
  EXPECT_EQ(report.at("framesIn"), 4);
  EXPECT_EQ(report.at("keyFramesKept"), 4);
  EXPECT_EQ(report.at("perFrameTimings").size(), 4u);
  const VideoId vid = report.at("v_id");

  const auto list = client->Get("/api/videos");
  ASSERT_TRUE(list);
  const auto videos = json::parse(list->body).at("videos");
  ASSERT_EQ(videos.size(), 1u);
  EXPECT_EQ(videos[0].at("v_name"), "clip one");
  EXPECT_EQ(videos[0].at("frameCount"), 4);
  EXPECT_TRUE(videos[0].at("ingestedAt").is_string());
  const auto key_frames = videos[0].at("keyFrames").get<std::vector<FrameId>>();
  EXPECT_EQ(engine->catalog().keyframes_of(vid)[0].i_name, "f0.ppm");
  EXPECT_EQ(json::parse(client->Get("/api/videos?name=one")->body).at("videos").size(), 1u);
  EXPECT_EQ(json::parse(client->Get("/api/videos?name=two")->body).at("videos").size(), 0u);

  // Search by upload matches the engine exactly.
  const auto& query = frames[3];  // f0.ppm
  const auto res = search_image(query.bytes, "4");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200) << res->body;
  const auto results = json::parse(res->body).at("results");
  const auto direct = engine->search({query.bytes, 4, WeightProfile(), false});
  ASSERT_EQ(results.size(), direct.size());
  for (std::size_t i = 0; i < direct.size(); ++i) {
    EXPECT_EQ(results[i].at("rank"), i + 1);
    EXPECT_EQ(results[i].at("frameId"), direct[i].result.frame_id);
    EXPECT_EQ(results[i].at("combined").get<double>(), direct[i].result.combined);
    EXPECT_EQ(results[i].at("v_id"), vid);
    EXPECT_EQ(results[i].at("videoName"), "clip one");
    EXPECT_EQ(results[i].at("distances").size(), 7u);
    EXPECT_EQ(results[i].at("distances").at("histogram").get<double>(), direct[i].result.per_feature[0]);
  }
  EXPECT_EQ(results[0].at("frameName"), "f0.ppm");
  EXPECT_EQ(results[0].at("combined"), 0.0);

  // Search by stored frame id.
  const auto by_id = client->Get("/api/search?frame=" + std::to_string(key_frames[0]) + "&k=2&exhaustive=1");
  ASSERT_TRUE(by_id);
  ASSERT_EQ(by_id->status, 200) << by_id->body;
  EXPECT_EQ(json::parse(by_id->body).at("results")[0].at("frameId"), key_frames[0]);
  EXPECT_EQ(json::parse(by_id->body).at("results").size(), 2u);

  // Image bytes are the stored key frame.
  const auto image = client->Get(results[0].at("image").get<std::string>());
  ASSERT_TRUE(image);
  EXPECT_EQ(image->status, 200);
  EXPECT_EQ(image->get_header_value("Content-Type"), "image/x-portable-pixmap");
  EXPECT_EQ(load_frame(Bytes(image->body.begin(), image->body.end())), load_frame(query.bytes));
  expect_error(client->Get("/api/frames/9999/image"), 404, "UnknownId");

  const auto del = client->Delete("/api/videos/" + std::to_string(vid), {{kAdminTokenHeader, kToken}});
  ASSERT_TRUE(del);
  EXPECT_EQ(del->status, 200);
  EXPECT_EQ(json::parse(client->Get("/api/videos")->body).at("videos").size(), 0u);
}

TEST_F(HttpApi, BadParameters) {
  Rng rng(73);
  ASSERT_EQ(upload("v", distinct_frames(rng, 2))->status, 201);
  expect_error(search_image(Bytes{'x'}), 400, "UnsupportedFormat");
  expect_error(search_image(encode_ppm(Raster(8, 8)), "0"), 400, "InvalidArgument");
  expect_error(client->Get("/api/search?frame=abc"), 400, "InvalidArgument");
  expect_error(client->Get("/api/search?frame=999"), 404, "UnknownId");
  expect_error(client->Get("/api/search"), 400, "InvalidArgument");
  expect_error(client->Get("/api/search?frame=1&weights=1,2"), 400, "InvalidArgument");
  expect_error(client->Get("/api/eval"), 400, "InvalidArgument");
}

TEST_F(HttpApi, WeightsChangeRanking) {
  Rng rng(74);
  const auto frames = distinct_frames(rng, 5);
  ASSERT_EQ(upload("v", frames)->status, 201);
  const auto id = engine->catalog().all_keyframes()[2].i_id;
  const auto url = "/api/search?frame=" + std::to_string(id) + "&k=5&weights=histogram=1";
  const auto res = client->Get(url);
  ASSERT_TRUE(res);
  const auto results = json::parse(res->body).at("results");
  const auto direct = engine->search_by_frame(id, 5, WeightProfile::only(FeatureKind::Histogram), false);
  ASSERT_EQ(results.size(), direct.size());
  for (std::size_t i = 0; i < direct.size(); ++i) EXPECT_EQ(results[i].at("frameId"), direct[i].result.frame_id);
}

TEST_F(HttpApi, Evaluate) {
  Rng rng(75);
  const auto frames = distinct_frames(rng, 5);
  ASSERT_EQ(upload("v", frames)->status, 201);
  const auto id = engine->catalog().all_keyframes()[1].i_id;
  const std::string labels = "q1.ppm " + std::to_string(id) + "\n";

  httplib::MultipartFormDataItems items = {
      {"labels", labels, "", ""},
      {"queries", std::string(frames[1].bytes.begin(), frames[1].bytes.end()), "q1.ppm", ""},
      {"ks", "1,5", "", ""}};
  const auto posted = client->Post("/api/eval", items);
  ASSERT_TRUE(posted);
  ASSERT_EQ(posted->status, 200) << posted->body;
  const auto report = json::parse(posted->body);
  EXPECT_EQ(report.at("ks"), json::array({1, 5}));
  EXPECT_EQ(report.at("methods").size(), 7u);
  EXPECT_EQ(report.at("methods")[5], "Simple Region Growing");
  EXPECT_EQ(report.at("meanPrecision").size(), 2u);
  EXPECT_EQ(report.at("meanPrecision")[1].size(), 7u);
  EXPECT_EQ(report.at("meanPrecision")[1][6], 0.2);
  EXPECT_NE(report.at("text").get<std::string>().find("Avg. prec.at 5 frames"), std::string::npos);

  write_file(dir.path() / "q1.ppm", frames[1].bytes);
  write_file(dir.path() / "labels.txt", Bytes(labels.begin(), labels.end()));
  const auto got = client->Get("/api/eval?ks=1,5&labels=" + httplib::detail::encode_url((dir.path() / "labels.txt").string()));
  ASSERT_TRUE(got);
  ASSERT_EQ(got->status, 200) << got->body;
  EXPECT_EQ(json::parse(got->body).at("meanPrecision"), report.at("meanPrecision"));

  httplib::MultipartFormDataItems missing = {{"labels", "other.ppm 1\n", "", ""}};
  expect_error(client->Post("/api/eval", missing), 400, "InvalidArgument");
}

TEST_F(HttpApi, ConcurrentSearches) {
  Rng rng(76);
  const auto frames = distinct_frames(rng, 4);
  ASSERT_EQ(upload("v", frames)->status, 201);
  const auto expected = search_image(frames[2].bytes)->body;
  std::vector<std::thread> threads;
  std::vector<std::string> bodies(6);
  for (std::size_t t = 0; t < bodies.size(); ++t) {
    threads.emplace_back([&, t] {
      httplib::Client c("127.0.0.1", port);
      c.set_read_timeout(60, 0);
      httplib::MultipartFormDataItems items = {
          {"image", std::string(frames[2].bytes.begin(), frames[2].bytes.end()), "q.ppm", ""}, {"k", "5", "", ""}};
      if (auto r = c.Post("/api/search", items)) bodies[t] = r->body;
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& b : bodies) EXPECT_EQ(b, expected);
}
