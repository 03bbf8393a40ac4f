// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include "groundstation/config.hpp"

namespace gs {

struct HttpReply {
  std::optional<int> status;  ///< empty when no response was received
  std::string body;
  std::string error;          ///< transport error description
};

/// Splits "http://host:port/path?q" into "http://host:port" and "/path?q".
/// Throws ValidationError when there is no scheme or host.
std::pair<std::string, std::string> split_url(std::string_view url);

/// Outbound HTTP used to reach devices.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpReply send(HttpMethod method, const std::string& url, const std::string& json_body,
                         std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib backed transport; one short-lived connection per call.
class BlockingHttpTransport final : public HttpTransport {
 public:
  HttpReply send(HttpMethod method, const std::string& url, const std::string& json_body,
                 std::chrono::milliseconds timeout) override;
};

}  // namespace gs
