// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "groundstation/clock.hpp"
#include "groundstation/config.hpp"
#include "groundstation/telemetry.hpp"

namespace gs {

/// Ordered by staleness: Active < OnHold < Inactive.
enum class DeviceStatus { Active = 0, OnHold = 1, Inactive = 2 };

std::string_view to_wire(DeviceStatus status);
std::optional<DeviceStatus> status_from_wire(std::string_view wire);

/// Age thresholds, already multiplied by any time scale in effect.
struct LivenessThresholds {
  std::chrono::nanoseconds on_hold;
  std::chrono::nanoseconds inactive;

  static LivenessThresholds from_config(const StationConfig& cfg, double scale = 1.0);
};

/// age < on_hold: Active; on_hold <= age < inactive: OnHold; otherwise
/// Inactive. Reaching a threshold escalates. Negative ages count as zero.
DeviceStatus classify(std::chrono::nanoseconds age, const LivenessThresholds& thresholds);
DeviceStatus classify(SteadyTime last_seen, SteadyTime now, const StationConfig& cfg);

struct DeviceRecord {
  std::int64_t id = 0;
  std::string device_kind;
  double lat = 0.0;
  double lng = 0.0;
  double alt = 0.0;
  std::string address;
  std::int64_t seq = 0;
  std::int64_t msg_type = 0;
  std::optional<std::string> device_time;
  SteadyTime last_seen{};
  WallTime last_seen_wall{};
  DeviceStatus status = DeviceStatus::Active;

  bool operator==(const DeviceRecord&) const = default;
};

/// The authoritative device list. Records are never evicted; a silent device
/// just ages into Inactive. All members are safe to call concurrently.
class Registry {
 public:
  explicit Registry(LivenessThresholds thresholds);

  /// Inserts or overwrites the record for msg.id (last write wins) and marks
  /// it seen at `now`. last_seen never moves backwards.
  DeviceRecord register_or_update(const TelemetryMessage& msg, SteadyTime now);

  /// All records with status recomputed at `now`, ascending by id.
  std::vector<DeviceRecord> snapshot(SteadyTime now) const;

  std::optional<DeviceRecord> lookup(std::int64_t id) const;
  std::size_t size() const;

  const LivenessThresholds& thresholds() const { return thresholds_; }

 private:
  LivenessThresholds thresholds_;
  mutable std::shared_mutex mutex_;
  std::map<std::int64_t, DeviceRecord> records_;
};

using SnapshotSink = std::function<void(const std::vector<DeviceRecord>& records, SteadyTime now)>;

/// Emits `registry.snapshot(now)` every `period` until `stop` is requested.
/// Ticks are scheduled on an absolute grid so they do not drift. Exceptions
/// thrown by the sink are reported to `on_error` and the loop carries on.
void run_update_loop(const Registry& registry, const Clock& clock,
                     std::chrono::nanoseconds period, const SnapshotSink& sink,
                     std::stop_token stop,
                     const std::function<void(const std::string&)>& on_error = {});

/// Owns a background thread running run_update_loop.
class UpdateLoop {
 public:
  UpdateLoop(const Registry& registry, const Clock& clock, std::chrono::nanoseconds period,
             SnapshotSink sink, std::function<void(const std::string&)> on_error = {});
  ~UpdateLoop();

  UpdateLoop(const UpdateLoop&) = delete;
  UpdateLoop& operator=(const UpdateLoop&) = delete;

  void stop();

 private:
  std::jthread thread_;
};

}  // namespace gs
