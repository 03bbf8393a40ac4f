// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "groundstation/clock.hpp"
#include "groundstation/config.hpp"
#include "groundstation/dispatcher.hpp"
#include "groundstation/event_log.hpp"
#include "groundstation/http_transport.hpp"
#include "groundstation/hub.hpp"
#include "groundstation/ingestion.hpp"
#include "groundstation/registry.hpp"
#include "groundstation/serial_bridge.hpp"

namespace gs {

struct BindAddress {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8000;
};

/// "host:port", ":port" or "port". Throws ParseError.
BindAddress parse_bind(std::string_view text);

inline constexpr std::string_view kStreamRoute = "/ws/connection/";
inline constexpr std::string_view kCommandRoute = "/ws/receive/";

struct StationOptions {
  StationConfig config;
  BindAddress bind;
  std::filesystem::path log_dir = "logs";
  std::chrono::milliseconds cmd_timeout{2000};
  /// Multiplies the liveness thresholds and the snapshot period.
  double time_scale = 1.0;
  std::optional<std::filesystem::path> static_dir;
  bool debug_routes = false;
  int io_threads = 4;
  std::size_t outbox_capacity = kDefaultOutboxCapacity;
  std::chrono::milliseconds serial_retry = kSerialRetryPeriod;
  /// Borrowed; default is the system clock.
  const Clock* clock = nullptr;
  /// Borrowed; default is a blocking HTTP client.
  HttpTransport* transport = nullptr;
  /// Module name of the log file.
  std::string log_module = "gs";
};

/// The ground station process: HTTP ingestion, the two WebSocket routes,
/// the registry update loop and the optional serial bridge, all on one port.
class Station {
 public:
  /// Opens the log file. Throws IoError.
  explicit Station(StationOptions options);
  ~Station();

  Station(const Station&) = delete;
  Station& operator=(const Station&) = delete;

  /// Binds and begins serving. Throws IoError if the address cannot be bound.
  void start();

  /// Stops background loops, sends close frames to consoles, writes the
  /// `shutdown` log line. Idempotent.
  void stop();

  /// Blocks until stop() has completed.
  void wait();

  /// Bound port (useful with port 0).
  std::uint16_t port() const;
  std::string base_url() const;

  /// {"http":..,"ws":..,"serial":..,"registry_size":..}
  std::string health_json() const;

  const StationOptions& options() const;
  Registry& registry();
  Hub& hub();
  EventLog& log();
  Dispatcher& dispatcher();
  IngestionService& ingestion();
  SerialState serial_state() const;
  std::size_t ws_session_count() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace gs
