// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include "groundstation/registry.hpp"

#include <exception>
#include <mutex>

namespace gs {

std::string_view to_wire(DeviceStatus status) {
  switch (status) {
    case DeviceStatus::Active:
      return "active";
    case DeviceStatus::OnHold:
      return "on-hold";
    case DeviceStatus::Inactive:
      return "inactive";
  }
  return "inactive";
}

std::optional<DeviceStatus> status_from_wire(std::string_view wire) {
  if (wire == "active") return DeviceStatus::Active;
  if (wire == "on-hold") return DeviceStatus::OnHold;
  if (wire == "inactive") return DeviceStatus::Inactive;
  return std::nullopt;
}

LivenessThresholds LivenessThresholds::from_config(const StationConfig& cfg, double scale) {
  auto scaled = [scale](std::chrono::seconds s) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::duration<double>(static_cast<double>(s.count()) * scale));
  };
  return LivenessThresholds{scaled(cfg.secs_on_hold), scaled(cfg.secs_inactive)};
}

DeviceStatus classify(std::chrono::nanoseconds age, const LivenessThresholds& t) {
  if (age < t.on_hold) return DeviceStatus::Active;
  if (age < t.inactive) return DeviceStatus::OnHold;
  return DeviceStatus::Inactive;
}

DeviceStatus classify(SteadyTime last_seen, SteadyTime now, const StationConfig& cfg) {
  return classify(std::chrono::duration_cast<std::chrono::nanoseconds>(now - last_seen),
                  LivenessThresholds::from_config(cfg));
}

Registry::Registry(LivenessThresholds thresholds) : thresholds_(thresholds) {}

DeviceRecord Registry::register_or_update(const TelemetryMessage& msg, SteadyTime now) {
  std::unique_lock lock(mutex_);
  auto [it, inserted] = records_.try_emplace(msg.id);
  auto& rec = it->second;
  SteadyTime seen = inserted ? now : std::max(rec.last_seen, now);
  rec.id = msg.id;
  rec.device_kind = msg.device_kind;
  rec.lat = msg.lat;
  rec.lng = msg.lng;
  rec.alt = msg.alt;
  rec.address = msg.address;
  rec.seq = msg.seq;
  rec.msg_type = msg.msg_type;
  rec.device_time = msg.device_time;
  rec.last_seen = seen;
  rec.last_seen_wall = msg.received_at;
  rec.status = classify(std::chrono::duration_cast<std::chrono::nanoseconds>(now - seen),
                        thresholds_);
  return rec;
}

std::vector<DeviceRecord> Registry::snapshot(SteadyTime now) const {
  std::shared_lock lock(mutex_);
  std::vector<DeviceRecord> out;
  out.reserve(records_.size());
  for (const auto& [id, rec] : records_) {
    auto& copy = out.emplace_back(rec);
    copy.status = classify(std::chrono::duration_cast<std::chrono::nanoseconds>(now - rec.last_seen),
                           thresholds_);
  }
  return out;
}

std::optional<DeviceRecord> Registry::lookup(std::int64_t id) const {
  std::shared_lock lock(mutex_);
  auto it = records_.find(id);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::size_t Registry::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

void run_update_loop(const Registry& registry, const Clock& clock,
                     std::chrono::nanoseconds period, const SnapshotSink& sink,
                     std::stop_token stop,
                     const std::function<void(const std::string&)>& on_error) {
  auto next = clock.now() + period;
  while (clock.sleep_until(next, stop)) {
    auto now = clock.now();
    try {
      sink(registry.snapshot(now), now);
    } catch (const std::exception& e) {
      if (on_error) on_error(e.what());
    } catch (...) {
      if (on_error) on_error("unknown error in snapshot sink");
    }
    next += period;
    // Fell more than a period behind: re-anchor instead of bursting.
    if (next < now) next = now + period;
  }
}

UpdateLoop::UpdateLoop(const Registry& registry, const Clock& clock,
                       std::chrono::nanoseconds period, SnapshotSink sink,
                       std::function<void(const std::string&)> on_error)
    : thread_([&registry, &clock, period, sink = std::move(sink),
               on_error = std::move(on_error)](std::stop_token st) {
        run_update_loop(registry, clock, period, sink, st, on_error);
      }) {}

UpdateLoop::~UpdateLoop() { stop(); }

void UpdateLoop::stop() {
  if (thread_.joinable()) {
    thread_.request_stop();
    thread_.join();
  }
}

}  // namespace gs
