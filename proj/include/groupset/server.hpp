#pragma once

#include <atomic>
#include <string>

#include "httplib.h"

#include "groupset/api.hpp"

namespace groupset {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  unsigned workers = 8;  // HTTP worker threads
  ApiLimits limits;
};

// HTTP adapter: every request goes through Router::handle. Blocks in run() until stop().
class HttpServer {
 public:
  HttpServer(SessionStore& store, ServerOptions opt) : router_(store, opt.limits), opt_(std::move(opt)) {
    const unsigned workers = std::max(1u, opt_.workers);
    server_.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
    // SO_REUSEADDR only: with httplib's default SO_REUSEPORT a second instance would bind
    // the same port and split the sessions between two processes.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      auto r = router_.handle(req.method, req.path, req.body);
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
    const std::string any = R"(/.*)";
    server_.Get(any, handler);
    server_.Post(any, handler);
    server_.Put(any, handler);
    server_.Delete(any, handler);
    server_.Patch(any, handler);
  }

  // Binds and returns the port; throws when the address is unavailable.
  int bind() {
    int port = opt_.port;
    if (port == 0) {
      port = server_.bind_to_any_port(opt_.host);
    } else if (!server_.bind_to_port(opt_.host, port)) {
      port = -1;
    }
    if (port < 0) throw Error("cannot bind " + opt_.host + ":" + std::to_string(opt_.port));
    port_ = port;
    return port;
  }

  void run() { server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() const { server_.wait_until_ready(); }
  int port() const noexcept { return port_; }

 private:
  Router router_;
  ServerOptions opt_;
  httplib::Server server_;
  int port_ = -1;
};

}  // namespace groupset
