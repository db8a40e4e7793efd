#pragma once

#include "cbvr/engine.hpp"
#include "cbvr/error.hpp"

#include <memory>
#include <string>

namespace cbvr {

struct HttpOptions {
  /// Shared secret for POST/DELETE on /api/videos. Empty rejects every admin call.
  std::string admin_token;
  std::size_t thread_count = 8;
};

inline constexpr const char* kAdminTokenHeader = "X-Admin-Token";

/// JSON API over an Engine. Routes:
///
///   POST   /api/videos               multipart: name, frames (files)   admin
///   DELETE /api/videos/{id}                                            admin
///   GET    /api/videos[?name=sub]
///   GET    /api/search?frame=ID[&k&weights&exhaustive]
///   POST   /api/search               multipart: image, k, weights, exhaustive
///   GET    /api/frames/{id}/image
///   GET    /api/eval?labels=PATH[&ks=20,30]
///   POST   /api/eval                 multipart: labels, queries (files), ks
///
/// Failures answer {"error": Kind, "message": text} with 400, 401, 404, 409
/// or 500.
class HttpService {
 public:
  HttpService(Engine& engine, HttpOptions options);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Blocks until stop().
  bool listen(const std::string& host, int port);
  /// Returns the chosen port, or -1.
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Status code for an error kind.
int http_status(ErrorKind kind);

}  // namespace cbvr
