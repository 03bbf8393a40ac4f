// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "groundstation/config.hpp"
#include "groundstation/event_log.hpp"
#include "groundstation/http_transport.hpp"
#include "groundstation/registry.hpp"

namespace gs {

struct SingleDevice {
  std::int64_t id;
  bool operator==(const SingleDevice&) const = default;
};
struct AllDevices {
  bool operator==(const AllDevices&) const = default;
};
using TargetSelector = std::variant<SingleDevice, AllDevices>;

/// Wire encoding used by consoles: -1 selects every registered device.
inline constexpr std::int64_t kAllDevicesId = -1;
TargetSelector selector_from_wire(std::int64_t id);
std::int64_t selector_to_wire(const TargetSelector& target);

struct CommandRequest {
  TargetSelector target;
  int code = 0;
  std::map<std::string, std::string> params;
};

enum class SendResult { Sent, HttpError, Unreachable, UnknownDevice };
std::string_view to_wire(SendResult result);

struct TargetOutcome {
  std::int64_t device_id = 0;
  std::string url;
  HttpMethod method = HttpMethod::Get;
  SendResult result = SendResult::Sent;
  int http_status = 0;  ///< set for Sent and HttpError
  std::string detail;
};

struct DispatchOutcome {
  int code = 0;
  std::vector<TargetOutcome> targets;
};

nlohmann::ordered_json to_json(const DispatchOutcome& outcome);

/// The requested code is not in the command table. Raised before any I/O.
class UnknownCommand : public std::runtime_error {
 public:
  explicit UnknownCommand(int code);
  int code() const { return code_; }

 private:
  int code_;
};

/// `address` + endpoint with exactly one slash between them.
std::string build_command_url(std::string_view device_address, const CommandSpec& spec);

/// Opaque handle for a repeating command.
struct RepeatHandle {
  std::uint64_t value = 0;
  bool operator==(const RepeatHandle&) const = default;
  auto operator<=>(const RepeatHandle&) const = default;
};

/// Sends operator commands to devices. Targets of one request are contacted
/// concurrently; repeating commands each get their own thread.
class Dispatcher {
 public:
  using TickObserver = std::function<void(const DispatchOutcome&)>;

  Dispatcher(const StationConfig& cfg, const Registry& registry, EventLog& log,
             HttpTransport& transport,
             std::chrono::milliseconds timeout = std::chrono::milliseconds{2000});
  ~Dispatcher();

  Dispatcher(const Dispatcher&) = delete;
  Dispatcher& operator=(const Dispatcher&) = delete;

  /// Resolves targets, logs `send-get`/`send-post` with the full URL before
  /// each call and waits for every call to settle. Throws UnknownCommand.
  DispatchOutcome dispatch(const CommandRequest& req) const;

  /// Dispatches `req` now and then every `interval`, resolving targets anew
  /// at each tick. Throws UnknownCommand without spawning anything.
  RepeatHandle start_repeating(const CommandRequest& req,
                               std::chrono::nanoseconds interval = std::chrono::seconds{1},
                               TickObserver on_tick = {});

  /// Idempotent. Once it returns no further dispatch of this handle begins.
  void stop_repeating(RepeatHandle handle);
  void stop_all();

  std::size_t active_repeats() const;
  std::chrono::milliseconds timeout() const { return timeout_; }

 private:
  struct Repeat;

  const CommandSpec& require(int code) const;

  const StationConfig& cfg_;
  const Registry& registry_;
  EventLog& log_;
  HttpTransport& transport_;
  std::chrono::milliseconds timeout_;

  mutable std::mutex repeats_mutex_;
  std::map<RepeatHandle, std::shared_ptr<Repeat>> repeats_;
  std::uint64_t next_handle_ = 1;
};

}  // namespace gs
