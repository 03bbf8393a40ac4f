// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include "groundstation/fleet_sim.hpp"

#include <charconv>
#include <cmath>
#include <condition_variable>
#include <numbers>

#include <httplib.h>
#include <json.hpp>

#include "groundstation/http_transport.hpp"

namespace gs::sim {

namespace {

double parse_real(std::string_view text, std::string_view what) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ParseError("motion " + std::string(what) + " is not a number: '" + std::string(text) + "'");
  }
  return v;
}

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

}  // namespace

Motion parse_motion(std::string_view text) {
  if (text == "fixed") return FixedMotion{};
  if (text.starts_with("circle:")) {
    auto rest = text.substr(7);
    auto colon = rest.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError("expected circle:<radius_m>:<rad_per_s>, got '" + std::string(text) + "'");
    }
    CircleMotion c{parse_real(rest.substr(0, colon), "radius"),
                   parse_real(rest.substr(colon + 1), "angular speed")};
    if (c.radius_m < 0) throw ParseError("circle radius must be >= 0");
    return c;
  }
  throw ParseError("unknown motion '" + std::string(text) + "' (use fixed or circle:R:W)");
}

GeoPosition position_at(const GeoPosition& center, const Motion& motion, double t_seconds) {
  const auto* circle = std::get_if<CircleMotion>(&motion);
  if (!circle) return center;
  double angle = circle->angular_speed * t_seconds;
  double east = circle->radius_m * std::cos(angle);
  double north = circle->radius_m * std::sin(angle);
  double lat0 = center.lat / kDegPerRad;
  GeoPosition p = center;
  p.lat = center.lat + north / kEarthRadiusM * kDegPerRad;
  p.lng = center.lng + east / (kEarthRadiusM * std::cos(lat0)) * kDegPerRad;
  return p;
}

SimDevice::SimDevice(DeviceOptions options, EventLog* log)
    : options_(std::move(options)), log_(log) {
  for (auto ep : kCommandEndpoints) hits_[std::string(ep)] = 0;
}

SimDevice::~SimDevice() { stop(); }

std::string SimDevice::address() const {
  return "http://" + options_.host + ":" + std::to_string(options_.port) + "/";
}

TelemetryMessage SimDevice::telemetry_at(double t_seconds, std::int64_t seq) const {
  auto pos = position_at(options_.start, options_.motion, t_seconds);
  TelemetryMessage msg;
  msg.id = options_.id;
  msg.lat = pos.lat;
  msg.lng = pos.lng;
  msg.alt = pos.alt;
  msg.address = address();
  msg.device_kind = options_.kind;
  msg.seq = seq;
  msg.msg_type = options_.msg_type;
  return msg;
}

std::map<std::string, std::int64_t> SimDevice::hits() const {
  std::lock_guard lock(hits_mutex_);
  return hits_;
}

std::int64_t SimDevice::hits(std::string_view endpoint) const {
  std::lock_guard lock(hits_mutex_);
  auto it = hits_.find(std::string(endpoint));
  return it == hits_.end() ? 0 : it->second;
}

void SimDevice::start() {
  if (server_) return;
  server_ = std::make_unique<httplib::Server>();
  auto& srv = *server_;
  // Exclusive bind: two devices must never share a command port.
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  auto command = [this](std::string endpoint) {
    return [this, endpoint](const httplib::Request&, httplib::Response& res) {
      {
        std::lock_guard lock(hits_mutex_);
        ++hits_[endpoint];
      }
      if (log_) log_->log_info("uav-" + std::to_string(options_.id), endpoint, "receive-command");
      nlohmann::ordered_json ack;
      ack["ack"] = endpoint;
      ack["id"] = options_.id;
      res.set_content(ack.dump(), "application/json");
    };
  };
  for (auto ep : kCommandEndpoints) {
    std::string path = "/" + std::string(ep);
    srv.Get(path, command(std::string(ep)));
    srv.Post(path, command(std::string(ep)));
  }
  srv.Get("/_hits", [this](const httplib::Request&, httplib::Response& res) {
    nlohmann::ordered_json j(hits());
    res.set_content(j.dump(), "application/json");
  });
  srv.Get("/_pause", [this](const httplib::Request&, httplib::Response& res) {
    pause();
    res.set_content(R"({"paused":true})", "application/json");
  });
  srv.Get("/_resume", [this](const httplib::Request&, httplib::Response& res) {
    resume();
    res.set_content(R"({"paused":false})", "application/json");
  });

  if (options_.port == 0) {
    int port = srv.bind_to_any_port(options_.host);
    if (port <= 0) throw IoError("sim device " + std::to_string(options_.id) + ": cannot bind");
    options_.port = static_cast<std::uint16_t>(port);
  } else if (!srv.bind_to_port(options_.host, options_.port)) {
    server_.reset();
    throw IoError("sim device " + std::to_string(options_.id) + ": cannot bind " + options_.host +
                  ":" + std::to_string(options_.port));
  }
  server_thread_ = std::thread([&srv] { srv.listen_after_bind(); });
  srv.wait_until_ready();

  post_thread_ = std::jthread([this](std::stop_token st) { post_loop(st); });
}

void SimDevice::stop() {
  if (post_thread_.joinable()) {
    post_thread_.request_stop();
    post_thread_.join();
  }
  if (server_) {
    server_->stop();
    if (server_thread_.joinable()) server_thread_.join();
    server_.reset();
  }
}

void SimDevice::post_loop(std::stop_token stop) {
  std::string url = options_.station_url;
  if (!url.ends_with('/')) url.push_back('/');
  url += options_.telemetry_path;
  std::pair<std::string, std::string> target;
  try {
    target = split_url(url);
  } catch (const std::exception&) {
    if (log_) log_->log_exception("invalid station url " + url);
    return;
  }

  httplib::Client client(target.first);
  client.set_connection_timeout(options_.post_timeout);
  client.set_read_timeout(options_.post_timeout);
  client.set_write_timeout(options_.post_timeout);

  std::mutex m;
  std::condition_variable_any cv;
  const auto t0 = std::chrono::steady_clock::now();
  auto next = t0;
  std::int64_t seq = 0;
  const auto source = "uav-" + std::to_string(options_.id);
  while (!stop.stop_requested()) {
    if (!paused_) {
      double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      auto msg = telemetry_at(t, seq++);
      auto body = to_form_body(msg);
      if (log_) log_->log_info(source, to_json_body(msg), "send-post");
      auto res = client.Post(target.second, body, "application/x-www-form-urlencoded");
      if (res && res->status == 200) {
        ++sent_;
      } else {
        ++failed_;
        if (log_) {
          log_->log_info(source,
                         res ? "HTTP status " + std::to_string(res->status)
                             : "station unreachable: " + httplib::to_string(res.error()),
                         "send-error");
        }
      }
    }
    next += options_.period;
    auto now = std::chrono::steady_clock::now();
    if (next < now) next = now;
    std::unique_lock lock(m);
    cv.wait_until(lock, stop, next, [] { return false; });
  }
}

Fleet::Fleet(FleetOptions options, EventLog* log) {
  if (options.count < 1) throw ValidationError("fleet needs at least one device");
  for (int i = 0; i < options.count; ++i) {
    DeviceOptions d;
    d.id = options.first_id + i;
    d.host = options.host;
    d.port = options.base_port == 0 ? 0 : static_cast<std::uint16_t>(options.base_port + i);
    d.station_url = options.station_url;
    d.telemetry_path = options.telemetry_path;
    d.period = options.period;
    d.motion = options.motion;
    d.start = options.origin;
    d.start.lng += options.spacing_deg * i;
    devices_.push_back(std::make_unique<SimDevice>(std::move(d), log));
  }
}

void Fleet::start() {
  for (auto& d : devices_) d->start();
}

void Fleet::stop() {
  for (auto& d : devices_) d->stop();
}

}  // namespace gs::sim
