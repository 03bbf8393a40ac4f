// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "groundstation/clock.hpp"
#include "groundstation/registry.hpp"

namespace gs {

using OrderedJson = nlohmann::ordered_json;

inline constexpr int kProtocolVersion = 1;

enum class EnvelopeKind { DeviceUpdate, RegistrySnapshot, DispatchReport, SerialLine, ConnectionStatus };

std::string_view to_wire(EnvelopeKind kind);
std::optional<EnvelopeKind> envelope_kind_from_wire(std::string_view wire);

/// One typed message on the station -> console WebSocket stream.
struct UiEnvelope {
  EnvelopeKind kind;
  OrderedJson payload;
  WallTime ts;
};

using EnvelopeSink = std::function<void(const UiEnvelope&)>;

/// `{"v":1,"kind":...,"ts":...,"payload":{...}}`
std::string to_wire(const UiEnvelope& env);

/// `{"v":1,"kind":"error","ts":...,"reason":...}`
std::string error_frame(std::string_view reason, WallTime ts);

/// ISO-8601 UTC with microseconds, e.g. "2021-12-12T20:58:32.706792Z".
std::string iso8601(WallTime ts);

/// The enriched device object forwarded to consoles and written to the
/// `receive-info` log line. Key order follows the device wire format.
OrderedJson device_json(const TelemetryMessage& msg, DeviceStatus status, std::string_view via);

/// One entry of a registry-snapshot payload; `age_ms` is measured at `now`.
OrderedJson record_json(const DeviceRecord& rec, SteadyTime now);

UiEnvelope device_update(const TelemetryMessage& msg, DeviceStatus status, std::string_view via);
UiEnvelope registry_snapshot(const std::vector<DeviceRecord>& records, SteadyTime now, WallTime ts);

/// `{"serial": "connected" | "disconnected" | "disabled"}`
UiEnvelope connection_status(std::string_view channel, std::string_view state, WallTime ts);

}  // namespace gs
