// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include "groundstation/envelope.hpp"

#include <cstdio>

namespace gs {

std::string_view to_wire(EnvelopeKind kind) {
  switch (kind) {
    case EnvelopeKind::DeviceUpdate:
      return "device-update";
    case EnvelopeKind::RegistrySnapshot:
      return "registry-snapshot";
    case EnvelopeKind::DispatchReport:
      return "dispatch-report";
    case EnvelopeKind::SerialLine:
      return "serial-line";
    case EnvelopeKind::ConnectionStatus:
      return "connection-status";
  }
  return "unknown";
}

std::optional<EnvelopeKind> envelope_kind_from_wire(std::string_view wire) {
  for (auto k : {EnvelopeKind::DeviceUpdate, EnvelopeKind::RegistrySnapshot,
                 EnvelopeKind::DispatchReport, EnvelopeKind::SerialLine,
                 EnvelopeKind::ConnectionStatus}) {
    if (to_wire(k) == wire) return k;
  }
  return std::nullopt;
}

std::string iso8601(WallTime ts) {
  using namespace std::chrono;
  auto us = floor<microseconds>(ts);
  auto day = floor<days>(us);
  year_month_day ymd{day};
  hh_mm_ss<microseconds> tod{us - day};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%06lldZ", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), int(tod.hours().count()),
                int(tod.minutes().count()), int(tod.seconds().count()),
                static_cast<long long>(tod.subseconds().count()));
  return buf;
}

std::string to_wire(const UiEnvelope& env) {
  OrderedJson j;
  j["v"] = kProtocolVersion;
  j["kind"] = to_wire(env.kind);
  j["ts"] = iso8601(env.ts);
  j["payload"] = env.payload;
  return j.dump();
}

std::string error_frame(std::string_view reason, WallTime ts) {
  OrderedJson j;
  j["v"] = kProtocolVersion;
  j["kind"] = "error";
  j["ts"] = iso8601(ts);
  j["reason"] = reason;
  return j.dump();
}

OrderedJson device_json(const TelemetryMessage& msg, DeviceStatus status, std::string_view via) {
  OrderedJson j;
  j["id"] = msg.id;
  j["type"] = msg.msg_type;
  j["seq"] = msg.seq;
  j["lat"] = msg.lat;
  j["lng"] = msg.lng;
  j["alt"] = msg.alt;
  j["device"] = msg.device_kind;
  j["ip"] = msg.address;
  j["method"] = via;
  j["time"] = msg.device_time ? *msg.device_time : iso8601(msg.received_at);
  j["status"] = to_wire(status);
  j["received_at"] = iso8601(msg.received_at);
  return j;
}

OrderedJson record_json(const DeviceRecord& rec, SteadyTime now) {
  OrderedJson j;
  j["id"] = rec.id;
  j["type"] = rec.msg_type;
  j["seq"] = rec.seq;
  j["lat"] = rec.lat;
  j["lng"] = rec.lng;
  j["alt"] = rec.alt;
  j["device"] = rec.device_kind;
  j["ip"] = rec.address;
  j["status"] = to_wire(rec.status);
  j["last_seen"] = iso8601(rec.last_seen_wall);
  j["age_ms"] = std::chrono::duration<double, std::milli>(now - rec.last_seen).count();
  return j;
}

UiEnvelope device_update(const TelemetryMessage& msg, DeviceStatus status, std::string_view via) {
  return UiEnvelope{EnvelopeKind::DeviceUpdate, device_json(msg, status, via), msg.received_at};
}

UiEnvelope registry_snapshot(const std::vector<DeviceRecord>& records, SteadyTime now, WallTime ts) {
  OrderedJson devices = OrderedJson::array();
  for (const auto& rec : records) devices.push_back(record_json(rec, now));
  OrderedJson payload;
  payload["devices"] = std::move(devices);
  return UiEnvelope{EnvelopeKind::RegistrySnapshot, std::move(payload), ts};
}

UiEnvelope connection_status(std::string_view channel, std::string_view state, WallTime ts) {
  OrderedJson payload;
  payload[std::string(channel)] = state;
  return UiEnvelope{EnvelopeKind::ConnectionStatus, std::move(payload), ts};
}

}  // namespace gs
