// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include "groundstation/event_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>

namespace gs {

namespace {

constexpr std::string_view kSeparator = "; ";
constexpr std::size_t kTimestampLength = 23;  // "2021-12-12 20:58:32,706"

bool parse_digits(std::string_view text, std::size_t pos, std::size_t count, int& out) {
  if (pos + count > text.size()) return false;
  for (std::size_t i = 0; i < count; ++i) {
    if (text[pos + i] < '0' || text[pos + i] > '9') return false;
  }
  std::from_chars(text.data() + pos, text.data() + pos + count, out);
  return true;
}

// Field separators cannot appear inside source/origin; line breaks cannot
// appear anywhere.
std::string clean_field(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (char c : in) {
    out.push_back(c == ';' ? '_' : (c == '\n' || c == '\r') ? ' ' : c);
  }
  if (out.empty()) out = "-";
  return out;
}

std::string clean_payload(std::string_view in) {
  std::string out(in);
  for (auto& c : out) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

}  // namespace

std::string format_log_timestamp(LogTime ts) {
  using namespace std::chrono;
  auto day = floor<days>(ts);
  year_month_day ymd{day};
  hh_mm_ss<milliseconds> tod{ts - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%02d,%03lld", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), int(tod.hours().count()),
                int(tod.minutes().count()), int(tod.seconds().count()),
                static_cast<long long>(tod.subseconds().count()));
  return buf;
}

std::optional<LogTime> parse_log_timestamp(std::string_view t) {
  using namespace std::chrono;
  if (t.size() != kTimestampLength || t[4] != '-' || t[7] != '-' || t[10] != ' ' ||
      t[13] != ':' || t[16] != ':' || t[19] != ',') {
    return std::nullopt;
  }
  int y, mo, d, h, mi, s, ms;
  if (!parse_digits(t, 0, 4, y) || !parse_digits(t, 5, 2, mo) || !parse_digits(t, 8, 2, d) ||
      !parse_digits(t, 11, 2, h) || !parse_digits(t, 14, 2, mi) || !parse_digits(t, 17, 2, s) ||
      !parse_digits(t, 20, 3, ms)) {
    return std::nullopt;
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms};
}

std::string format_log_line(const LogEvent& e) {
  std::string line = format_log_timestamp(e.ts);
  line += kSeparator;
  line += e.source;
  line += kSeparator;
  line += e.origin;
  line += kSeparator;
  line += e.payload;
  return line;
}

std::optional<LogEvent> parse_log_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::string_view parts[3];
  std::string_view rest = line;
  for (auto& part : parts) {
    auto sep = rest.find(kSeparator);
    if (sep == std::string_view::npos) return std::nullopt;
    part = rest.substr(0, sep);
    rest.remove_prefix(sep + kSeparator.size());
  }
  auto ts = parse_log_timestamp(parts[0]);
  if (!ts) return std::nullopt;
  for (auto field : {parts[1], parts[2]}) {
    if (field.empty() || field.find(';') != std::string_view::npos) return std::nullopt;
  }
  return LogEvent{*ts, std::string(parts[1]), std::string(parts[2]), std::string(rest)};
}

std::string log_file_name(std::string_view module_name, WallTime created, int collision_index) {
  using namespace std::chrono;
  auto secs = floor<seconds>(created);
  auto day = floor<days>(secs);
  year_month_day ymd{day};
  hh_mm_ss<seconds> tod{secs - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "-%04d-%02u-%02u-%02d-%02d-%02d", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), int(tod.hours().count()),
                int(tod.minutes().count()), int(tod.seconds().count()));
  std::string name(module_name);
  name += buf;
  if (collision_index > 0) name += "-" + std::to_string(collision_index);
  name += ".log";
  return name;
}

ParsedLog parse_log_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read log file " + path.string());
  ParsedLog out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line == "\r") continue;
    if (auto ev = parse_log_line(line)) {
      out.events.push_back(std::move(*ev));
    } else {
      out.malformed.push_back({number, line});
    }
  }
  return out;
}

EventLog::EventLog(const std::filesystem::path& dir, std::string_view module_name, WallSource wall)
    : wall_(std::move(wall)) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create log directory " + dir.string() + ": " + ec.message());
  auto created = wall_();
  for (int index = 0; index < 1000; ++index) {
    auto candidate = dir / log_file_name(module_name, created, index);
    fd_ = ::open(candidate.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ >= 0) {
      path_ = candidate;
      return;
    }
    if (errno != EEXIST) {
      throw IoError("cannot create log file " + candidate.string() + ": " + std::strerror(errno));
    }
  }
  throw IoError("too many log files with the same name in " + dir.string());
}

EventLog::~EventLog() {
  if (fd_ >= 0) ::close(fd_);
}

void EventLog::append(std::string_view source, std::string_view origin, std::string_view payload) {
  std::lock_guard lock(mutex_);
  auto ts = std::chrono::floor<std::chrono::milliseconds>(wall_());
  if (ts < last_ts_) ts = last_ts_;
  last_ts_ = ts;
  auto line = format_log_line({ts, clean_field(source), clean_field(origin), clean_payload(payload)});
  line.push_back('\n');

  std::string_view rest = line;
  while (!rest.empty()) {
    auto n = ::write(fd_, rest.data(), rest.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      std::cerr << "event log " << path_.string() << ": write failed: " << std::strerror(errno)
                << '\n';
      return;
    }
    rest.remove_prefix(static_cast<std::size_t>(n));
  }
  ++lines_;
}

void EventLog::log_info(std::string_view source, std::string_view payload, std::string_view origin) {
  append(source, origin, payload);
}

void EventLog::log_json(std::string_view source, const nlohmann::ordered_json& data,
                        std::string_view origin) {
  append(source, origin, data.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
}

void EventLog::log_exception(std::string_view context, std::exception_ptr error,
                             std::string_view source) {
  std::string what = "unknown error";
  if (error) {
    try {
      std::rethrow_exception(error);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
  }
  std::string payload(context);
  if (!payload.empty()) payload += ": ";
  payload += what;
  append(source, "exception", payload);
}

std::size_t EventLog::lines_written() const {
  std::lock_guard lock(mutex_);
  return lines_;
}

}  // namespace gs
