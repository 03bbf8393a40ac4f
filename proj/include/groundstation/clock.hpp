// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <stop_token>

namespace gs {

using SteadyTime = std::chrono::steady_clock::time_point;
using WallTime = std::chrono::system_clock::time_point;

/// Time source for everything that ages or schedules. Liveness runs on the
/// monotonic reading; the wall reading is for display and logs only.
class Clock {
 public:
  virtual ~Clock() = default;

  virtual SteadyTime now() const = 0;
  virtual WallTime wall_now() const = 0;

  /// Blocks until `deadline` or until `stop` is requested. Returns false when
  /// woken by a stop request.
  virtual bool sleep_until(SteadyTime deadline, std::stop_token stop) const = 0;
};

class SystemClock final : public Clock {
 public:
  SteadyTime now() const override { return std::chrono::steady_clock::now(); }
  WallTime wall_now() const override { return std::chrono::system_clock::now(); }
  bool sleep_until(SteadyTime deadline, std::stop_token stop) const override;

  static const SystemClock& instance();
};

/// Scripted clock for tests: time moves only through advance().
class ManualClock final : public Clock {
 public:
  explicit ManualClock(WallTime wall_origin = WallTime{});

  SteadyTime now() const override;
  WallTime wall_now() const override;
  bool sleep_until(SteadyTime deadline, std::stop_token stop) const override;

  void advance(std::chrono::steady_clock::duration delta);

  /// Number of threads currently parked in sleep_until.
  int sleepers() const;

 private:
  mutable std::mutex mutex_;
  mutable std::condition_variable_any cv_;
  std::chrono::steady_clock::duration elapsed_{};
  WallTime wall_origin_;
  mutable int sleepers_ = 0;
};

}  // namespace gs
