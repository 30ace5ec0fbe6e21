#pragma once

#include "anigreen/error.hpp"

#include <json.hpp>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace anigreen {

/// HTTP-ish status for an error code: 404 unknown session, 500 numerical
/// failures, 400 otherwise.
int http_status(ErrorCode code);

nlohmann::json error_message(const Error& e);

struct SessionImpl;

/// In-process session registry behind the HTTP service. Each session owns a
/// precomputed coordinate table; messages on one session are serialized and
/// cage_update requests that queue up behind a running compute are
/// superseded by newer ones (latest wins).
class SessionManager {
 public:
  SessionManager();
  ~SessionManager();
  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  /// Returns {"id", "dim", "revision", "precompute_ms", ...}. Throws Error.
  nlohmann::json create(const nlohmann::json& scene, const std::string& base_dir = ".");
  bool destroy(const std::string& id);
  nlohmann::json info(const std::string& id) const;
  std::size_t size() const;

  /// One request message in, response messages out. Errors become "error"
  /// messages; an unknown session throws UnknownSession.
  std::vector<nlohmann::json> handle(const std::string& id, const nlohmann::json& message);

  /// A batch, in order. Runs of consecutive cage_update messages collapse to
  /// the last one; the dropped ones are acknowledged with a "superseded"
  /// progress message.
  std::vector<nlohmann::json> handle_batch(const std::string& id, const std::vector<nlohmann::json>& messages);

  /// NDJSON in, NDJSON out (one compact object per line).
  std::string handle_stream(const std::string& id, const std::string& ndjson);

 private:
  std::shared_ptr<SessionImpl> find(const std::string& id) const;

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<SessionImpl>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// Serves SessionManager over HTTP:
///   POST /sessions, DELETE /sessions/{id}, GET /sessions/{id}/info,
///   POST /sessions/{id}/stream (NDJSON request and response bodies).
class HttpServer {
 public:
  explicit HttpServer(SessionManager& sessions);
  ~HttpServer();

  /// Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace anigreen
