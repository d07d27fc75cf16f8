// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

// In-process HTTP server on an ephemeral localhost port.

#pragma once

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <atomic>
#include <functional>
#include <string>
#include <thread>

#include "stylepipe/jsonl.hpp"

namespace fixtures {

class JsonServer {
 public:
  // `handler` maps a request body to (status, response body).
  using Handler = std::function<std::pair<int, stylepipe::Json>(const stylepipe::Json&)>;

  JsonServer(const std::string& path, Handler handler) : handler_(std::move(handler)) {
    server_.Post(path, [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      last_auth_ = req.get_header_value("Authorization");
      auto [status, body] = handler_(stylepipe::Json::parse(req.body));
      res.status = status;
      res.set_content(body.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    url_ = "http://127.0.0.1:" + std::to_string(port_) + path;
  }
  ~JsonServer() {
    server_.stop();
    thread_.join();
  }
  const std::string& url() const { return url_; }
  int requests() const { return requests_.load(); }
  const std::string& last_auth() const { return last_auth_; }

 private:
  Handler handler_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::string url_;
  std::atomic<int> requests_{0};
  std::string last_auth_;
};

}  // namespace fixtures
