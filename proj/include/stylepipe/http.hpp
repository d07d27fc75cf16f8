// Copyright 2026 The stylepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <thread>

#include "stylepipe/jsonl.hpp"

namespace stylepipe::http {

struct Url {
  std::string scheme_host_port;  // "http://host:port"
  std::string path;              // "/v1/translate"
};

// Throws Error("config") for anything but http:// or https:// URLs.
Url parse_url(std::string_view url);

struct Response {
  int status = 0;  // 0 when the request never completed
  std::string body;
  std::string error;
};

struct ClientOptions {
  std::chrono::milliseconds timeout{30000};
  std::string api_key;  // sent as "Authorization: Bearer <key>" when set
};

Response post_json(const std::string& url, const Json& body,
                   const ClientOptions& options);

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds base_delay{500};
  double jitter = 0.25;  // +/- fraction of each delay
};

// Delay before retry number `retry` (1-based), before jitter.
std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int retry);
std::chrono::milliseconds jittered(std::chrono::milliseconds d, double jitter);

// Invokes `attempt()` until it returns true or the attempts are exhausted,
// sleeping with exponential backoff in between. Returns the last outcome.
template <typename Attempt>
bool with_retry(const RetryPolicy& policy, Attempt&& attempt) {
  for (int i = 0; i < std::max(policy.attempts, 1); ++i) {
    if (i > 0) {
      std::this_thread::sleep_for(jittered(backoff_delay(policy, i), policy.jitter));
    }
    if (attempt()) return true;
  }
  return false;
}

}  // namespace stylepipe::http
