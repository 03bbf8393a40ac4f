// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "groundstation/event_log.hpp"
#include "groundstation/telemetry.hpp"

namespace httplib {
class Server;
}

namespace gs::sim {

struct GeoPosition {
  double lat = -15.840081;
  double lng = -47.926642;
  double alt = 0.0;
};

struct FixedMotion {};
/// Circle of `radius_m` around the start position at `angular_speed` rad/s.
struct CircleMotion {
  double radius_m = 100.0;
  double angular_speed = 0.1;
};
using Motion = std::variant<FixedMotion, CircleMotion>;

/// "fixed" or "circle:<radius_m>:<rad_per_s>". Throws ParseError.
Motion parse_motion(std::string_view text);

inline constexpr double kEarthRadiusM = 6371008.8;

/// Position after `t_seconds` of motion starting at angle 0 (due east of
/// the centre). Uses a local tangent-plane approximation.
GeoPosition position_at(const GeoPosition& center, const Motion& motion, double t_seconds);

/// Endpoints every simulated device serves.
inline constexpr std::array<std::string_view, 7> kCommandEndpoints = {
    "position_absolute_json", "position_relative_json", "auto",           "run_experiment",
    "set_auto",               "rtl",                    "takeoff_and_hold"};

struct DeviceOptions {
  std::int64_t id = 1;
  std::string host = "127.0.0.1";
  std::uint16_t port = 5071;
  std::string station_url = "http://127.0.0.1:8000/";
  std::string telemetry_path = "update-info/";
  std::string kind = "uav";
  std::int64_t msg_type = 102;
  GeoPosition start;
  std::chrono::milliseconds period{5000};
  Motion motion = FixedMotion{};
  std::chrono::milliseconds post_timeout{1000};
};

/// One fake vehicle: an HTTP server for commands plus a telemetry timer.
class SimDevice {
 public:
  explicit SimDevice(DeviceOptions options, EventLog* log = nullptr);
  ~SimDevice();

  SimDevice(const SimDevice&) = delete;
  SimDevice& operator=(const SimDevice&) = delete;

  /// Binds the command server and starts posting telemetry. Throws IoError
  /// if the port cannot be bound.
  void start();
  void stop();

  void pause() { paused_ = true; }
  void resume() { paused_ = false; }
  bool paused() const { return paused_; }

  std::map<std::string, std::int64_t> hits() const;
  std::int64_t hits(std::string_view endpoint) const;

  /// Telemetry the device would send at `t_seconds` after start.
  TelemetryMessage telemetry_at(double t_seconds, std::int64_t seq) const;

  std::string address() const;
  std::int64_t id() const { return options_.id; }
  std::uint16_t port() const { return options_.port; }
  std::size_t telemetry_sent() const { return sent_.load(); }
  std::size_t telemetry_failed() const { return failed_.load(); }

 private:
  void post_loop(std::stop_token stop);

  DeviceOptions options_;
  EventLog* log_;
  std::unique_ptr<httplib::Server> server_;
  std::thread server_thread_;
  std::jthread post_thread_;
  std::atomic<bool> paused_{false};
  std::atomic<std::size_t> sent_{0};
  std::atomic<std::size_t> failed_{0};
  mutable std::mutex hits_mutex_;
  std::map<std::string, std::int64_t> hits_;
};

struct FleetOptions {
  int count = 1;
  std::int64_t first_id = 1;
  std::string host = "127.0.0.1";
  std::uint16_t base_port = 5071;
  std::string station_url = "http://127.0.0.1:8000/";
  std::string telemetry_path = "update-info/";
  std::chrono::milliseconds period{5000};
  Motion motion = FixedMotion{};
  GeoPosition origin;
  /// Devices are spread `spacing_deg` apart in longitude.
  double spacing_deg = 0.0005;
};

/// `count` devices with ids first_id.. and ports base_port..
class Fleet {
 public:
  explicit Fleet(FleetOptions options, EventLog* log = nullptr);

  void start();
  void stop();

  std::vector<std::unique_ptr<SimDevice>>& devices() { return devices_; }
  SimDevice& device(std::size_t index) { return *devices_.at(index); }

 private:
  std::vector<std::unique_ptr<SimDevice>> devices_;
};

}  // namespace gs::sim
