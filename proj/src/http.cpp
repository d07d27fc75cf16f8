// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "stylepipe/http.hpp"

#include <random>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "stylepipe/error.hpp"

namespace stylepipe::http {

Url parse_url(std::string_view url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error("config", "malformed URL: " + std::string(url));
  }
  std::string_view scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error("config", "unsupported URL scheme: " + std::string(url));
  }
  auto path_start = url.find('/', scheme_end + 3);
  Url out;
  if (path_start == std::string_view::npos) {
    out.scheme_host_port = std::string(url);
    out.path = "/";
  } else {
    out.scheme_host_port = std::string(url.substr(0, path_start));
    out.path = std::string(url.substr(path_start));
  }
  if (out.scheme_host_port.size() <= scheme_end + 3) {
    throw Error("config", "URL has no host: " + std::string(url));
  }
  return out;
}

Response post_json(const std::string& url, const Json& body,
                   const ClientOptions& options) {
  Url u = parse_url(url);
  httplib::Client client(u.scheme_host_port);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!options.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options.api_key);
  }
  Response out;
  auto res = client.Post(u.path, headers, body.dump(), "application/json");
  if (!res) {
    out.error = httplib::to_string(res.error());
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  return out;
}

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int retry) {
  return policy.base_delay * (std::int64_t{1} << std::max(retry - 1, 0));
}

std::chrono::milliseconds jittered(std::chrono::milliseconds d, double jitter) {
  if (jitter <= 0.0 || d.count() == 0) return d;
  thread_local std::mt19937_64 rng{std::random_device{}()};
  std::uniform_real_distribution<double> u(-jitter, jitter);
  return std::chrono::milliseconds(
      static_cast<std::int64_t>(static_cast<double>(d.count()) * (1.0 + u(rng))));
}

}  // namespace stylepipe::http
