// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include "groundstation/http_transport.hpp"

#include <httplib.h>

namespace gs {

std::pair<std::string, std::string> split_url(std::string_view url) {
  auto scheme = url.find("://");
  if (scheme == std::string_view::npos || scheme == 0) {
    throw ValidationError("URL has no scheme: " + std::string(url));
  }
  auto path = url.find('/', scheme + 3);
  auto base = url.substr(0, path);
  if (base.size() <= scheme + 3) throw ValidationError("URL has no host: " + std::string(url));
  std::string rest = path == std::string_view::npos ? "/" : std::string(url.substr(path));
  return {std::string(base), rest};
}

HttpReply BlockingHttpTransport::send(HttpMethod method, const std::string& url,
                                      const std::string& json_body,
                                      std::chrono::milliseconds timeout) {
  HttpReply reply;
  std::pair<std::string, std::string> parts;
  try {
    parts = split_url(url);
  } catch (const std::exception& e) {
    reply.error = e.what();
    return reply;
  }
  httplib::Client client(parts.first);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  client.set_keep_alive(false);

  auto result = method == HttpMethod::Get
                    ? client.Get(parts.second)
                    : client.Post(parts.second, json_body, "application/json");
  if (!result) {
    reply.error = httplib::to_string(result.error());
    return reply;
  }
  reply.status = result->status;
  reply.body = result->body;
  return reply;
}

}  // namespace gs
