// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include "groundstation/clock.hpp"

namespace gs {

bool SystemClock::sleep_until(SteadyTime deadline, std::stop_token stop) const {
  std::mutex m;
  std::condition_variable_any cv;
  std::unique_lock lock(m);
  cv.wait_until(lock, stop, deadline, [] { return false; });
  return !stop.stop_requested();
}

const SystemClock& SystemClock::instance() {
  static const SystemClock clock;
  return clock;
}

ManualClock::ManualClock(WallTime wall_origin) : wall_origin_(wall_origin) {}

SteadyTime ManualClock::now() const {
  std::lock_guard lock(mutex_);
  return SteadyTime{} + elapsed_;
}

WallTime ManualClock::wall_now() const {
  std::lock_guard lock(mutex_);
  return wall_origin_ + std::chrono::duration_cast<WallTime::duration>(elapsed_);
}

bool ManualClock::sleep_until(SteadyTime deadline, std::stop_token stop) const {
  std::unique_lock lock(mutex_);
  ++sleepers_;
  cv_.notify_all();
  bool reached = cv_.wait(lock, stop, [&] { return SteadyTime{} + elapsed_ >= deadline; });
  --sleepers_;
  cv_.notify_all();
  return reached;
}

void ManualClock::advance(std::chrono::steady_clock::duration delta) {
  {
    std::lock_guard lock(mutex_);
    elapsed_ += delta;
  }
  cv_.notify_all();
}

int ManualClock::sleepers() const {
  std::lock_guard lock(mutex_);
  return sleepers_;
}

}  // namespace gs
