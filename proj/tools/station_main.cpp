// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "groundstation/station.hpp"
#include "signals.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Ground station: device registry, console WebSocket hub and command dispatch"};

  std::string config_path = "./config.ini";
  std::string bind = "127.0.0.1:8000";
  std::string log_dir = "./logs/";
  double cmd_timeout_s = 2.0;
  double scale = 1.0;
  std::string static_dir;
  bool debug_routes = false;

  app.add_option("--config", config_path, "INI configuration file")->capture_default_str();
  app.add_option("--bind", bind, "host:port to listen on")->capture_default_str();
  app.add_option("--log-dir", log_dir, "directory for experiment logs")->capture_default_str();
  app.add_option("--cmd-timeout", cmd_timeout_s, "per-device command timeout, seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--scale", scale, "multiply liveness thresholds and update period")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--static-dir", static_dir, "operator console assets served at /");
  app.add_flag("--debug-routes", debug_routes, "enable GET /<int>/ connectivity route");
  CLI11_PARSE(app, argc, argv);

  gs::StationOptions options;
  try {
    if (std::filesystem::exists(config_path)) {
      options.config = gs::load_config(config_path);
    } else if (app.count("--config") > 0) {
      std::cerr << "gs-station: config file " << config_path << " not found\n";
      return 2;
    } else {
      std::cerr << "gs-station: " << config_path << " not found, using defaults\n";
    }
    options.bind = gs::parse_bind(bind);
  } catch (const std::exception& e) {
    std::cerr << "gs-station: " << e.what() << '\n';
    return 2;
  }
  options.log_dir = log_dir;
  options.cmd_timeout = std::chrono::milliseconds(static_cast<long long>(cmd_timeout_s * 1000));
  options.time_scale = scale;
  if (!static_dir.empty()) options.static_dir = static_dir;
  options.debug_routes = debug_routes;

  auto signals = gs::tools::block_termination_signals();
  try {
    gs::Station station(std::move(options));
    station.start();
    std::cout << "gs-station listening on " << station.base_url() << " (log "
              << station.log().path().string() << ")" << std::endl;
    gs::tools::wait_for_signal(signals);
    std::cout << "gs-station shutting down" << std::endl;
    station.stop();
  } catch (const std::exception& e) {
    std::cerr << "gs-station: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
