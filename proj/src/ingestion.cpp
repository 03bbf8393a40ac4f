// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include "groundstation/ingestion.hpp"

#include <exception>

namespace gs {

namespace {

HttpResponse error_response(int status, std::string_view reason) {
  OrderedJson j;
  j["status"] = "error";
  j["reason"] = reason;
  return HttpResponse{status, j.dump()};
}

}  // namespace

std::string device_source(const TelemetryMessage& msg) {
  return msg.device_kind + "-" + std::to_string(msg.id);
}

IngestionService::IngestionService(const StationConfig& cfg, Registry& registry, EventLog& log,
                                   const Clock& clock, EnvelopeSink forward)
    : registry_(registry), log_(log), clock_(clock), forward_(std::move(forward)) {
  route_ = cfg.telemetry_path;
  if (!route_.starts_with('/')) route_.insert(route_.begin(), '/');
}

HttpResponse IngestionService::handle_telemetry_request(std::string_view method,
                                                        std::string_view path,
                                                        std::string_view body,
                                                        std::string_view content_type) {
  if (path != route_) return error_response(404, "not found");
  if (method != "POST") return error_response(405, "method not allowed");

  TelemetryMessage msg;
  try {
    msg = parse_telemetry(body, content_type);
  } catch (const std::exception& e) {
    log_.log_info("gs", std::string(e.what()) + " | body: " + std::string(body), "receive-error");
    return error_response(400, e.what());
  }

  auto rec = accept(std::move(msg), "post");
  OrderedJson ack;
  ack["status"] = "ok";
  ack["id"] = rec.id;
  return HttpResponse{200, ack.dump()};
}

DeviceRecord IngestionService::accept(TelemetryMessage msg, std::string_view via) {
  msg.received_at = clock_.wall_now();
  auto rec = registry_.register_or_update(msg, clock_.now());
  auto env = device_update(msg, rec.status, via);
  log_.log_json(device_source(msg), env.payload, "receive-info");
  try {
    if (forward_) forward_(env);
  } catch (...) {
    log_.log_exception("forwarding device update to consoles");
  }
  return rec;
}

}  // namespace gs
