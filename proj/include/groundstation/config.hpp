// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "groundstation/errors.hpp"

namespace gs {

enum class HttpMethod { Get, Post };

std::string_view to_string(HttpMethod method);
std::optional<HttpMethod> parse_http_method(std::string_view token);

/// One row of the command table: `code = endpoint,method`.
struct CommandSpec {
  int code = 0;
  std::string endpoint;
  HttpMethod method = HttpMethod::Get;

  bool operator==(const CommandSpec&) const = default;
};

using CommandTable = std::map<int, CommandSpec>;

/// The seven stock commands shipped with the station.
CommandTable default_command_table();

/// Every tunable of the station. Immutable once loaded.
struct StationConfig {
  // [serial]
  std::string serial_port = "COM4";
  int serial_baudrate = 115200;
  bool serial_available = false;

  // [post]
  std::string station_base_url = "http://127.0.0.1:8000/";
  std::string telemetry_path = "update-info/";

  // [list-updater]
  std::chrono::seconds secs_inactive{50};
  std::chrono::seconds secs_on_hold{25};
  std::chrono::seconds update_delay{20};

  // [commands-list]
  CommandTable commands = default_command_table();

  const CommandSpec* find_command(int code) const;

  bool operator==(const StationConfig&) const = default;
};

using WarningSink = std::function<void(const std::string&)>;

/// Parses `value` of a `[commands-list]` row. Throws CommandTableError.
CommandSpec parse_command_row(std::string_view key, std::string_view value);

/// Throws ValidationError on the first violated invariant.
void validate(const StationConfig& config);

/// Parses INI text. Unknown sections and keys are reported through `warn`
/// and otherwise ignored. Throws ParseError, ValidationError or
/// CommandTableError.
StationConfig parse_config(std::string_view text, const WarningSink& warn = {});

/// Reads and parses a config file; warnings go to stderr. Throws IoError if
/// the file cannot be read.
StationConfig load_config(const std::filesystem::path& path);

/// Renders a config as INI text that parse_config reads back unchanged.
std::string to_ini(const StationConfig& config);

}  // namespace gs
