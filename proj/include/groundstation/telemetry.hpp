// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "groundstation/clock.hpp"
#include "groundstation/errors.hpp"

namespace gs {

/// One position/status report from a device, after decoding.
struct TelemetryMessage {
  std::int64_t id = 0;
  double lat = 0.0;
  double lng = 0.0;
  double alt = 0.0;
  std::string address;  ///< normalized base URL, always ends with '/'
  std::string device_kind = "uav";
  std::int64_t seq = 0;
  std::int64_t msg_type = 0;
  std::optional<std::string> device_time;  ///< device-supplied "time", forwarded as-is
  WallTime received_at{};                  ///< stamped by the station

  bool operator==(const TelemetryMessage&) const = default;
};

/// Adds a missing "http://" scheme and a missing trailing slash. Throws
/// ParseError for an empty address and ValidationError for a non-http scheme
/// or an empty host.
std::string normalize_address(std::string_view raw);

/// Throws ValidationError unless id >= 0 and lat/lng are within WGS84 bounds.
void validate(const TelemetryMessage& msg);

/// Decodes a JSON or form-urlencoded body. The content type picks the
/// decoder; when it names neither, a body starting with '{' is read as JSON.
/// Required fields: id, lat, lng, alt, ip. `received_at` is left default.
/// Throws ParseError or ValidationError.
TelemetryMessage parse_telemetry(std::string_view body, std::string_view content_type);

/// Encodings used by devices (and by the fleet simulator).
std::string to_json_body(const TelemetryMessage& msg);
std::string to_form_body(const TelemetryMessage& msg);

}  // namespace gs
