// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "groundstation/clock.hpp"
#include "groundstation/dispatcher.hpp"
#include "groundstation/envelope.hpp"

namespace gs {

/// A serialized envelope shared by every client it is sent to.
using Frame = std::shared_ptr<const std::string>;

inline constexpr std::size_t kDefaultOutboxCapacity = 256;

/// Per-client FIFO with a hard cap. When full, the oldest frame is dropped
/// to make room; the console view is a cache, the log is the record.
class Outbox {
 public:
  explicit Outbox(std::size_t capacity = kDefaultOutboxCapacity);

  /// Returns false if a frame had to be dropped.
  bool push(Frame frame);
  std::optional<Frame> pop();
  /// Front frame without removing it.
  std::optional<Frame> front() const;

  std::size_t size() const;
  std::size_t dropped() const;
  std::size_t capacity() const { return capacity_; }

 private:
  mutable std::mutex mutex_;
  std::deque<Frame> frames_;
  std::size_t capacity_;
  std::size_t dropped_ = 0;
};

/// A connected console. deliver() must not block.
class Subscriber {
 public:
  virtual ~Subscriber() = default;
  virtual void deliver(Frame frame) = 0;
  virtual void close() = 0;
};

/// Fan-out point for /ws/connection/ clients.
class Hub {
 public:
  using Warn = std::function<void(const std::string&)>;
  explicit Hub(Warn warn = {});

  std::uint64_t attach(std::weak_ptr<Subscriber> subscriber);
  void detach(std::uint64_t id);

  /// Serializes once and hands the same frame to every client.
  void broadcast(const UiEnvelope& env);
  void broadcast(Frame frame);

  std::size_t client_count() const;
  void close_all();

  /// Reports an outbox overflow (called by transports).
  void warn(const std::string& message) const;

 private:
  Warn warn_;
  mutable std::mutex mutex_;
  std::map<std::uint64_t, std::weak_ptr<Subscriber>> clients_;
  std::uint64_t next_id_ = 1;
};

/// A decoded /ws/receive/ message.
struct UiCommandMessage {
  std::int64_t id = 0;  ///< target selector, -1 = all devices
  int type = 0;         ///< command code
  std::map<std::string, std::string> params;
  struct Repeat {
    bool start = true;
    std::chrono::milliseconds interval{1000};
  };
  std::optional<Repeat> repeat;
};

/// Throws ParseError naming the offending field.
UiCommandMessage parse_ui_command(std::string_view raw);

/// Handles /ws/receive/ frames: one reply frame per message. Dispatch reports
/// (including those of repeat ticks) are also handed to `reports`.
class CommandRouter {
 public:
  CommandRouter(Dispatcher& dispatcher, const Clock& clock, EventLog& log,
                EnvelopeSink reports = {});
  ~CommandRouter();

  CommandRouter(const CommandRouter&) = delete;
  CommandRouter& operator=(const CommandRouter&) = delete;

  /// Blocks while a one-shot command is dispatched.
  std::string handle_ui_command(std::string_view raw);

  void stop_all();
  std::size_t active_repeats() const;

 private:
  UiEnvelope report(const UiCommandMessage& msg, OrderedJson body) const;

  Dispatcher& dispatcher_;
  const Clock& clock_;
  EventLog& log_;
  EnvelopeSink reports_;
  mutable std::mutex mutex_;
  std::map<std::pair<std::int64_t, int>, RepeatHandle> repeats_;
};

}  // namespace gs
