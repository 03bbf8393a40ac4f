// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include "groundstation/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

namespace gs {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct IniEntry {
  std::string value;
  int line = 0;
};

// section -> key -> value. Keys are case-folded, as configparser does.
using IniDocument = std::map<std::string, std::map<std::string, IniEntry>>;

IniDocument parse_ini(std::string_view text) {
  IniDocument doc;
  std::string current;
  bool in_section = false;
  int line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (line_no == 1 && raw.starts_with("\xEF\xBB\xBF")) raw.remove_prefix(3);
    auto line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ParseError("line " + std::to_string(line_no) + ": malformed section header");
      }
      current = std::string(trim(line.substr(1, line.size() - 2)));
      in_section = true;
      doc[current];
      continue;
    }

    auto sep = line.find_first_of("=:");
    if (sep == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    if (!in_section) {
      throw ParseError("line " + std::to_string(line_no) + ": key outside of any section");
    }
    auto key = lower(trim(line.substr(0, sep)));
    if (key.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": empty key");
    }
    doc[current][key] = IniEntry{std::string(trim(line.substr(sep + 1))), line_no};
  }
  return doc;
}

long long parse_integer(const IniEntry& entry, std::string_view what) {
  long long value = 0;
  const auto* first = entry.value.data();
  const auto* last = first + entry.value.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || entry.value.empty()) {
    throw ParseError("line " + std::to_string(entry.line) + ": " + std::string(what) +
                     " must be an integer, got '" + entry.value + "'");
  }
  return value;
}

bool parse_bool(const IniEntry& entry, std::string_view what) {
  auto v = lower(entry.value);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ParseError("line " + std::to_string(entry.line) + ": " + std::string(what) +
                   " must be a boolean, got '" + entry.value + "'");
}

bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::string_view to_string(HttpMethod method) {
  return method == HttpMethod::Get ? "get" : "post";
}

std::optional<HttpMethod> parse_http_method(std::string_view token) {
  auto t = lower(trim(token));
  if (t == "get") return HttpMethod::Get;
  if (t == "post") return HttpMethod::Post;
  return std::nullopt;
}

CommandTable default_command_table() {
  return {
      {20, {20, "position_absolute_json", HttpMethod::Get}},
      {22, {22, "position_relative_json", HttpMethod::Get}},
      {24, {24, "auto", HttpMethod::Get}},
      {26, {26, "run_experiment", HttpMethod::Get}},
      {28, {28, "set_auto", HttpMethod::Get}},
      {30, {30, "rtl", HttpMethod::Get}},
      {32, {32, "takeoff_and_hold", HttpMethod::Get}},
  };
}

const CommandSpec* StationConfig::find_command(int code) const {
  auto it = commands.find(code);
  return it == commands.end() ? nullptr : &it->second;
}

CommandSpec parse_command_row(std::string_view key, std::string_view value) {
  auto k = trim(key);
  int code = -1;
  auto [ptr, ec] = std::from_chars(k.data(), k.data() + k.size(), code);
  if (k.empty() || ec != std::errc{} || ptr != k.data() + k.size() || code < 0) {
    throw CommandTableError("command code '" + std::string(key) +
                            "' is not a non-negative integer");
  }

  auto v = trim(value);
  auto commas = std::count(v.begin(), v.end(), ',');
  if (commas != 1) {
    throw CommandTableError("command " + std::to_string(code) +
                            ": expected 'endpoint,method', got '" + std::string(value) + "'");
  }
  auto comma = v.find(',');
  auto endpoint = trim(v.substr(0, comma));
  if (endpoint.empty() || has_whitespace(endpoint)) {
    throw CommandTableError("command " + std::to_string(code) + ": invalid endpoint '" +
                            std::string(endpoint) + "'");
  }
  while (endpoint.starts_with('/')) endpoint.remove_prefix(1);
  if (endpoint.empty()) {
    throw CommandTableError("command " + std::to_string(code) + ": empty endpoint");
  }
  auto method = parse_http_method(v.substr(comma + 1));
  if (!method) {
    throw CommandTableError("command " + std::to_string(code) + ": unknown method '" +
                            std::string(trim(v.substr(comma + 1))) + "'");
  }
  return CommandSpec{code, std::string(endpoint), *method};
}

void validate(const StationConfig& cfg) {
  if (cfg.serial_baudrate <= 0) throw ValidationError("serial baudrate must be positive");
  if (cfg.update_delay.count() <= 0) throw ValidationError("update_delay must be positive");
  if (cfg.secs_on_hold.count() < 0) throw ValidationError("on-hold threshold must be >= 0");
  if (cfg.secs_on_hold >= cfg.secs_inactive) {
    throw ValidationError("seconds_to_device_be_on_hold (" +
                          std::to_string(cfg.secs_on_hold.count()) +
                          ") must be smaller than seconds_to_device_be_inactive (" +
                          std::to_string(cfg.secs_inactive.count()) + ")");
  }
  if (cfg.telemetry_path.empty()) throw ValidationError("path_receive_info must not be empty");
  for (const auto& [code, spec] : cfg.commands) {
    if (code < 0 || spec.code != code) throw ValidationError("inconsistent command code");
    if (spec.endpoint.empty() || has_whitespace(spec.endpoint) ||
        spec.endpoint.find(',') != std::string::npos) {
      throw ValidationError("command " + std::to_string(code) + " has an invalid endpoint");
    }
  }
}

StationConfig parse_config(std::string_view text, const WarningSink& warn) {
  auto doc = parse_ini(text);
  StationConfig cfg;

  auto warn_unknown = [&](const std::string& section, const std::string& key) {
    if (warn) warn("ignoring unknown key '" + key + "' in [" + section + "]");
  };

  for (const auto& [section, entries] : doc) {
    if (section == "serial") {
      for (const auto& [key, entry] : entries) {
        if (key == "port") {
          cfg.serial_port = entry.value;
        } else if (key == "baudrate") {
          cfg.serial_baudrate = static_cast<int>(parse_integer(entry, "baudrate"));
        } else if (key == "serial_available") {
          cfg.serial_available = parse_bool(entry, "serial_available");
        } else {
          warn_unknown(section, key);
        }
      }
    } else if (section == "post" || section == "list-updater") {
      for (const auto& [key, entry] : entries) {
        if (section == "post" && key == "ip") {
          cfg.station_base_url = entry.value;
        } else if (section == "post" && key == "path_receive_info") {
          cfg.telemetry_path = entry.value;
        } else if (key == "seconds_to_device_be_inactive" || key == "seconds_to_device_be_on_hold" ||
                   key == "update_delay") {
          // Read from [list-updater]; [post] is only a fallback.
          if (section == "post" && doc.count("list-updater") && doc.at("list-updater").count(key)) {
            continue;
          }
          std::chrono::seconds value{parse_integer(entry, key)};
          if (key == "update_delay") {
            cfg.update_delay = value;
          } else if (key == "seconds_to_device_be_on_hold") {
            cfg.secs_on_hold = value;
          } else {
            cfg.secs_inactive = value;
          }
        } else {
          warn_unknown(section, key);
        }
      }
    } else if (section == "commands-list") {
      cfg.commands.clear();
      for (const auto& [key, entry] : entries) {
        auto spec = parse_command_row(key, entry.value);
        cfg.commands[spec.code] = spec;
      }
    } else if (warn) {
      warn("ignoring unknown section [" + section + "]");
    }
  }

  validate(cfg);
  return cfg;
}

StationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), [&](const std::string& msg) {
    std::cerr << "config " << path.string() << ": " << msg << '\n';
  });
}

std::string to_ini(const StationConfig& cfg) {
  std::ostringstream out;
  out << "[serial]\n"
      << "port = " << cfg.serial_port << '\n'
      << "baudrate = " << cfg.serial_baudrate << '\n'
      << "serial_available = " << (cfg.serial_available ? "true" : "false") << "\n\n"
      << "[post]\n"
      << "ip = " << cfg.station_base_url << '\n'
      << "path_receive_info = " << cfg.telemetry_path << "\n\n"
      << "[list-updater]\n"
      << "seconds_to_device_be_inactive = " << cfg.secs_inactive.count() << '\n'
      << "seconds_to_device_be_on_hold = " << cfg.secs_on_hold.count() << '\n'
      << "update_delay = " << cfg.update_delay.count() << "\n\n"
      << "[commands-list]\n";
  for (const auto& [code, spec] : cfg.commands) {
    out << code << " = " << spec.endpoint << ',' << to_string(spec.method) << '\n';
  }
  return out.str();
}

}  // namespace gs
