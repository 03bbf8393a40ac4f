// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include "groundstation/telemetry.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>

#include <httplib.h>
#include <json.hpp>

namespace gs {

namespace {

using Json = nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::int64_t integer_from_text(std::string_view field, std::string_view text) {
  auto t = trim(text);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ParseError("field '" + std::string(field) + "' is not an integer: '" + std::string(text) +
                     "'");
  }
  return v;
}

double real_from_text(std::string_view field, std::string_view text) {
  auto t = trim(text);
  double v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ParseError("field '" + std::string(field) + "' is not a number: '" + std::string(text) +
                     "'");
  }
  return v;
}

// Flat view over either encoding: every value is available as text, plus
// its JSON form when the body was JSON.
class FieldSource {
 public:
  virtual ~FieldSource() = default;
  virtual bool has(std::string_view key) const = 0;
  virtual std::int64_t integer(std::string_view key) const = 0;
  virtual double real(std::string_view key) const = 0;
  virtual std::string text(std::string_view key) const = 0;
};

class JsonFields final : public FieldSource {
 public:
  explicit JsonFields(const Json& obj) : obj_(obj) {}

  bool has(std::string_view key) const override {
    auto it = obj_.find(key);
    return it != obj_.end() && !it->is_null();
  }

  std::int64_t integer(std::string_view key) const override {
    const auto& v = obj_.at(std::string(key));
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      double d = v.get<double>();
      if (std::floor(d) == d && std::abs(d) < 9.0e15) return static_cast<std::int64_t>(d);
    }
    if (v.is_string()) return integer_from_text(key, v.get_ref<const std::string&>());
    throw ParseError("field '" + std::string(key) + "' is not an integer");
  }

  double real(std::string_view key) const override {
    const auto& v = obj_.at(std::string(key));
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return real_from_text(key, v.get_ref<const std::string&>());
    throw ParseError("field '" + std::string(key) + "' is not a number");
  }

  std::string text(std::string_view key) const override {
    const auto& v = obj_.at(std::string(key));
    if (v.is_string()) return v.get<std::string>();
    if (v.is_primitive()) return v.dump();
    throw ParseError("field '" + std::string(key) + "' must be a scalar");
  }

 private:
  const Json& obj_;
};

class FormFields final : public FieldSource {
 public:
  explicit FormFields(std::string_view body) {
    httplib::Params params;
    httplib::detail::parse_query_text(std::string(body), params);
    for (auto& [k, v] : params) fields_.emplace(k, v);  // first occurrence wins
  }

  bool has(std::string_view key) const override { return fields_.count(std::string(key)) > 0; }
  std::int64_t integer(std::string_view key) const override {
    return integer_from_text(key, fields_.at(std::string(key)));
  }
  double real(std::string_view key) const override {
    return real_from_text(key, fields_.at(std::string(key)));
  }
  std::string text(std::string_view key) const override { return fields_.at(std::string(key)); }

 private:
  std::map<std::string, std::string> fields_;
};

TelemetryMessage decode(const FieldSource& src) {
  for (std::string_view key : {"id", "lat", "lng", "alt", "ip"}) {
    if (!src.has(key)) throw ParseError("missing required field '" + std::string(key) + "'");
  }
  TelemetryMessage msg;
  msg.id = src.integer("id");
  msg.lat = src.real("lat");
  msg.lng = src.real("lng");
  msg.alt = src.real("alt");
  msg.address = normalize_address(src.text("ip"));
  if (src.has("device")) {
    auto kind = std::string(trim(src.text("device")));
    if (!kind.empty()) msg.device_kind = std::move(kind);
  }
  if (src.has("seq")) msg.seq = src.integer("seq");
  if (src.has("type")) msg.msg_type = src.integer("type");
  if (src.has("time")) msg.device_time = src.text("time");
  validate(msg);
  return msg;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
  auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(),
                        [](char a, char b) {
                          return std::tolower(static_cast<unsigned char>(a)) ==
                                 std::tolower(static_cast<unsigned char>(b));
                        });
  return it != haystack.end();
}

// Shortest round-trippable decimal text for a double.
std::string number_text(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc{} ? ptr : buf);
}

}  // namespace

std::string normalize_address(std::string_view raw) {
  auto addr = std::string(trim(raw));
  if (addr.empty()) throw ParseError("field 'ip' is empty");
  auto scheme_end = addr.find("://");
  if (scheme_end == std::string::npos) {
    addr = "http://" + addr;
    scheme_end = 4;
  }
  std::string scheme = addr.substr(0, scheme_end);
  std::transform(scheme.begin(), scheme.end(), scheme.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (scheme != "http") throw ValidationError("device address must be an http URL: " + addr);
  addr.replace(0, scheme_end, scheme);
  auto host_begin = scheme_end + 3;
  if (host_begin >= addr.size() || addr[host_begin] == '/') {
    throw ValidationError("device address has no host: " + addr);
  }
  if (std::any_of(addr.begin(), addr.end(), [](unsigned char c) { return std::isspace(c); })) {
    throw ValidationError("device address contains whitespace: " + addr);
  }
  if (addr.back() != '/') addr.push_back('/');
  return addr;
}

void validate(const TelemetryMessage& msg) {
  if (msg.id < 0) throw ValidationError("device id must be non-negative");
  if (!(msg.lat >= -90.0 && msg.lat <= 90.0)) {
    throw ValidationError("latitude out of range: " + number_text(msg.lat));
  }
  if (!(msg.lng >= -180.0 && msg.lng <= 180.0)) {
    throw ValidationError("longitude out of range: " + number_text(msg.lng));
  }
  if (!std::isfinite(msg.alt)) throw ValidationError("altitude is not finite");
}

TelemetryMessage parse_telemetry(std::string_view body, std::string_view content_type) {
  bool as_json;
  if (contains_ci(content_type, "json")) {
    as_json = true;
  } else if (contains_ci(content_type, "x-www-form-urlencoded")) {
    as_json = false;
  } else {
    as_json = trim(body).starts_with('{');
  }

  if (!as_json) return decode(FormFields(body));

  Json doc = Json::parse(body.begin(), body.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw ParseError("body is not valid JSON");
  if (!doc.is_object()) throw ParseError("telemetry JSON must be an object");
  return decode(JsonFields(doc));
}

std::string to_json_body(const TelemetryMessage& msg) {
  nlohmann::ordered_json j;
  j["id"] = msg.id;
  j["type"] = msg.msg_type;
  j["seq"] = msg.seq;
  j["lat"] = msg.lat;
  j["lng"] = msg.lng;
  j["alt"] = msg.alt;
  j["device"] = msg.device_kind;
  j["ip"] = msg.address;
  if (msg.device_time) j["time"] = *msg.device_time;
  return j.dump();
}

std::string to_form_body(const TelemetryMessage& msg) {
  httplib::Params params{
      {"id", std::to_string(msg.id)},      {"type", std::to_string(msg.msg_type)},
      {"seq", std::to_string(msg.seq)},    {"lat", number_text(msg.lat)},
      {"lng", number_text(msg.lng)},       {"alt", number_text(msg.alt)},
      {"device", msg.device_kind},         {"ip", msg.address},
  };
  if (msg.device_time) params.emplace("time", *msg.device_time);
  return httplib::detail::params_to_query_str(params);
}

}  // namespace gs
