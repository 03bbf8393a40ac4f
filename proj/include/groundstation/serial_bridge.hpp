// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "groundstation/event_log.hpp"

namespace gs {

/// Splits a byte stream into LF-terminated lines. Bytes after the last LF
/// stay buffered until their newline arrives. A trailing CR is stripped.
class LineFramer {
 public:
  explicit LineFramer(std::size_t max_line = 64 * 1024);

  std::vector<std::string> feed(std::string_view chunk);
  const std::string& pending() const { return pending_; }
  void reset() { pending_.clear(); }

  /// Lines longer than max_line are cut and emitted in pieces.
  std::size_t max_line() const { return max_line_; }

 private:
  std::string pending_;
  std::size_t max_line_;
};

enum class SerialState { Disabled, Disconnected, Connected };
std::string_view to_wire(SerialState state);

class NotConnected : public std::runtime_error {
 public:
  NotConnected() : std::runtime_error("serial port is not connected") {}
};

/// Termios speed constant for a numeric baudrate, if one exists.
std::optional<unsigned> baud_constant(int baudrate);

inline constexpr std::chrono::milliseconds kSerialRetryPeriod{2000};

/// Keeps a serial gateway attached: opens the port (8N1, raw), emits each
/// received line, writes queued commands, and on any error closes the port
/// and retries every retry period. One thread owns the port.
class SerialBridge {
 public:
  struct Callbacks {
    std::function<void(SerialState)> on_state;
    std::function<void(const std::string&)> on_line;
  };

  SerialBridge(std::string port, int baudrate, EventLog* log, Callbacks callbacks,
               std::chrono::milliseconds retry_period = kSerialRetryPeriod);
  ~SerialBridge();

  SerialBridge(const SerialBridge&) = delete;
  SerialBridge& operator=(const SerialBridge&) = delete;

  void start();
  void stop();

  SerialState state() const { return state_.load(); }

  /// Queues `line` + "\n" for the port. Throws NotConnected.
  void write_command(std::string_view line);

  std::size_t connections() const { return connections_.load(); }

 private:
  void run(std::stop_token stop);
  int open_port();
  bool serve(int fd, std::stop_token& stop);
  bool flush_writes(int fd);
  void set_state(SerialState s);
  void log(std::string_view origin, std::string_view payload);

  std::string port_;
  int baudrate_;
  EventLog* log_;
  Callbacks callbacks_;
  std::chrono::milliseconds retry_period_;

  std::atomic<SerialState> state_{SerialState::Disconnected};
  std::atomic<std::size_t> connections_{0};
  std::mutex write_mutex_;
  std::deque<std::string> writes_;
  int wake_pipe_[2] = {-1, -1};
  std::jthread thread_;
};

}  // namespace gs
