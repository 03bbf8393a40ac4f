// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "groundstation/fleet_sim.hpp"
#include "signals.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fleet simulator: fake devices that post telemetry and accept commands"};

  int count = 1;
  std::string station = "http://127.0.0.1:8000/";
  std::string path = "update-info/";
  int base_port = 5071;
  std::int64_t first_id = 1;
  double period = 5.0;
  double scale = 1.0;
  std::string motion_text = "fixed";
  std::string host = "127.0.0.1";
  std::string log_dir;
  double lat = -15.840081;
  double lng = -47.926642;

  app.add_option("--n", count, "number of devices")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--station", station, "station base URL")->capture_default_str();
  app.add_option("--path", path, "telemetry endpoint on the station")->capture_default_str();
  app.add_option("--base-port", base_port, "port of the first device, 0 for ephemeral")
      ->check(CLI::Range(0, 65535))
      ->capture_default_str();
  app.add_option("--first-id", first_id, "id of the first device")->capture_default_str();
  app.add_option("--period", period, "telemetry period, seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--scale", scale, "multiply all time constants")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--motion", motion_text, "fixed | circle:<radius_m>:<rad_per_s>")
      ->capture_default_str();
  app.add_option("--host", host, "address devices bind and report")->capture_default_str();
  app.add_option("--lat", lat, "start latitude")->capture_default_str();
  app.add_option("--lng", lng, "start longitude")->capture_default_str();
  app.add_option("--log-dir", log_dir, "write a uav_simulator log here");
  CLI11_PARSE(app, argc, argv);

  gs::sim::FleetOptions options;
  try {
    options.motion = gs::sim::parse_motion(motion_text);
  } catch (const std::exception& e) {
    std::cerr << "fleet-sim: " << e.what() << '\n';
    return 2;
  }
  if (auto* circle = std::get_if<gs::sim::CircleMotion>(&options.motion); circle && scale != 1.0) {
    circle->angular_speed /= scale;
  }
  if (base_port + count - 1 > 65535) {
    std::cerr << "fleet-sim: port range exceeds 65535\n";
    return 2;
  }
  options.count = count;
  options.first_id = first_id;
  options.host = host;
  options.base_port = static_cast<std::uint16_t>(base_port);
  options.station_url = station;
  options.telemetry_path = path;
  options.period = std::chrono::milliseconds(static_cast<long long>(period * scale * 1000));
  if (options.period.count() <= 0) options.period = std::chrono::milliseconds(1);
  options.origin.lat = lat;
  options.origin.lng = lng;

  auto signals = gs::tools::block_termination_signals();
  try {
    std::unique_ptr<gs::EventLog> log;
    if (!log_dir.empty()) log = std::make_unique<gs::EventLog>(log_dir, "uav_simulator");
    gs::sim::Fleet fleet(options, log.get());
    fleet.start();
    for (auto& d : fleet.devices()) {
      std::cout << "device " << d->id() << " serving " << d->address() << std::endl;
    }
    gs::tools::wait_for_signal(signals);
    fleet.stop();
  } catch (const std::exception& e) {
    std::cerr << "fleet-sim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
