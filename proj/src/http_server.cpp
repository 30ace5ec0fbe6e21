#include "anigreen/service.hpp"

#include <httplib.h>

#include <atomic>

namespace anigreen {

using nlohmann::json;

namespace {

void send_error(httplib::Response& res, const Error& e) {
  res.status = http_status(e.code());
  res.set_content(error_message(e).dump(), "application/json");
}

}  // namespace

struct HttpServer::Impl {
  SessionManager& sessions;
  httplib::Server server;
  std::atomic<bool> bound{false};

  explicit Impl(SessionManager& s) : sessions(s) {
    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        json scene;
        try {
          scene = json::parse(req.body);
        } catch (const json::parse_error& e) {
          throw Error(ErrorCode::ParseError, e.what());
        }
        res.status = 201;
        res.set_content(sessions.create(scene).dump(), "application/json");
      } catch (const Error& e) {
        send_error(res, e);
      }
    });
    server.Delete(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      if (!sessions.destroy(id)) {
        send_error(res, Error(ErrorCode::UnknownSession, "unknown session '" + id + "'"));
        return;
      }
      res.status = 204;
    });
    server.Get(R"(/sessions/([^/]+)/info)", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        res.set_content(sessions.info(req.matches[1]).dump(), "application/json");
      } catch (const Error& e) {
        send_error(res, e);
      }
    });
    server.Post(R"(/sessions/([^/]+)/stream)", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        res.set_content(sessions.handle_stream(req.matches[1], req.body), "application/x-ndjson");
      } catch (const Error& e) {
        send_error(res, e);
      }
    });
  }
};

HttpServer::HttpServer(SessionManager& sessions) : impl_(std::make_unique<Impl>(sessions)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound_port = -1;
  if (port == 0)
    bound_port = impl_->server.bind_to_any_port(host);
  else if (impl_->server.bind_to_port(host, port))
    bound_port = port;
  impl_->bound = bound_port > 0;
  return bound_port;
}

bool HttpServer::listen() {
  if (!impl_->bound) return false;
  return impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace anigreen
