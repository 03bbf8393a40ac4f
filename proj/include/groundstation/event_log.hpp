// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "groundstation/clock.hpp"
#include "groundstation/errors.hpp"

namespace gs {

using LogTime = std::chrono::sys_time<std::chrono::milliseconds>;

/// One line of an experiment log: `<ts>; <source>; <origin>; <payload>`.
struct LogEvent {
  LogTime ts;
  std::string source;   ///< who triggered it, e.g. "uav-21" or "gs"
  std::string origin;   ///< where it was triggered, e.g. "receive-info"
  std::string payload;  ///< JSON text or a URL

  bool operator==(const LogEvent&) const = default;
};

/// `YYYY-MM-DD HH:MM:SS,mmm`, UTC.
std::string format_log_timestamp(LogTime ts);
std::optional<LogTime> parse_log_timestamp(std::string_view text);

/// Formats without the trailing newline.
std::string format_log_line(const LogEvent& event);

/// Splits on "; " at most three times, so the payload may itself contain
/// semicolons. Returns nullopt for lines that do not follow the grammar.
std::optional<LogEvent> parse_log_line(std::string_view line);

/// `<module>-YYYY-MM-DD-HH-MM-SS.log`, or `...-SS-<n>.log` when n > 0.
std::string log_file_name(std::string_view module_name, WallTime created, int collision_index = 0);

struct MalformedLine {
  std::size_t line_number;  ///< 1-based
  std::string text;
};

struct ParsedLog {
  std::vector<LogEvent> events;
  std::vector<MalformedLine> malformed;
};

/// Throws IoError if the file cannot be read. Blank lines are skipped.
ParsedLog parse_log_file(const std::filesystem::path& path);

/// Append-only log file for one module. Each call writes one full line with
/// a single write(2) before returning; timestamps never go backwards within
/// the file. Write failures go to stderr and never throw.
class EventLog {
 public:
  using WallSource = std::function<WallTime()>;

  /// Creates `<dir>/<module>-<created>.log`, adding a numeric suffix if a
  /// file with that name exists. Throws IoError when the directory cannot be
  /// created or written.
  EventLog(const std::filesystem::path& dir, std::string_view module_name,
           WallSource wall = [] { return std::chrono::system_clock::now(); });
  ~EventLog();

  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  void log_info(std::string_view source, std::string_view payload, std::string_view origin);
  void log_json(std::string_view source, const nlohmann::ordered_json& data,
                std::string_view origin);

  /// Writes an `exception` line describing `error` (the in-flight exception
  /// by default) prefixed with `context`.
  void log_exception(std::string_view context, std::exception_ptr error = std::current_exception(),
                     std::string_view source = "gs");

  const std::filesystem::path& path() const { return path_; }
  std::size_t lines_written() const;

 private:
  void append(std::string_view source, std::string_view origin, std::string_view payload);

  std::filesystem::path path_;
  WallSource wall_;
  mutable std::mutex mutex_;
  int fd_ = -1;
  LogTime last_ts_{};
  std::size_t lines_ = 0;
};

}  // namespace gs
