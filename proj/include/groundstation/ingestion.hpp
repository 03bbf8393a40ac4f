// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "groundstation/clock.hpp"
#include "groundstation/config.hpp"
#include "groundstation/envelope.hpp"
#include "groundstation/event_log.hpp"
#include "groundstation/registry.hpp"
#include "groundstation/telemetry.hpp"

namespace gs {

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// `<kind>-<id>`, the log source for a device.
std::string device_source(const TelemetryMessage& msg);

/// Transport-independent handling of device telemetry: validate, register,
/// log, forward. Every accepted message produces exactly one registry write,
/// one `receive-info` line and one envelope.
class IngestionService {
 public:
  IngestionService(const StationConfig& cfg, Registry& registry, EventLog& log, const Clock& clock,
                   EnvelopeSink forward);

  /// `path` excludes the query string. Answers 404 for paths other than the
  /// telemetry path and 405 for non-POST requests on it.
  HttpResponse handle_telemetry_request(std::string_view method, std::string_view path,
                                        std::string_view body, std::string_view content_type);

  /// Registers an already decoded message; `via` is recorded as its
  /// "method" ("post", "serial"). Stamps received_at.
  DeviceRecord accept(TelemetryMessage msg, std::string_view via);

  /// "/" + telemetry path, e.g. "/update-info/".
  const std::string& route() const { return route_; }

 private:
  Registry& registry_;
  EventLog& log_;
  const Clock& clock_;
  EnvelopeSink forward_;
  std::string route_;
};

}  // namespace gs
