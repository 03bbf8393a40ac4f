// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "groundstation/config.hpp"
#include "groundstation/dispatcher.hpp"
#include "groundstation/envelope.hpp"
#include "groundstation/event_log.hpp"
#include "groundstation/fleet_sim.hpp"
#include "groundstation/registry.hpp"
#include "groundstation/station.hpp"
#include "groundstation/telemetry.hpp"

namespace py = pybind11;

namespace {

using namespace gs;

std::chrono::nanoseconds seconds_to_ns(double s) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::duration<double>(s));
}

double to_seconds(std::chrono::nanoseconds d) { return std::chrono::duration<double>(d).count(); }

// Accepts a datetime (naive means UTC) or POSIX seconds.
WallTime to_wall(const py::object& ts) {
  double secs;
  if (py::hasattr(ts, "timestamp")) {
    py::object aware = ts;
    if (ts.attr("tzinfo").is_none()) {
      auto utc = py::module_::import("datetime").attr("timezone").attr("utc");
      aware = ts.attr("replace")(py::arg("tzinfo") = utc);
    }
    secs = aware.attr("timestamp")().cast<double>();
  } else {
    secs = ts.cast<double>();
  }
  auto us = static_cast<long long>(std::llround(secs * 1e6));
  return WallTime{std::chrono::microseconds(us)};
}

py::object to_datetime(WallTime t) {
  auto dt = py::module_::import("datetime");
  auto us = std::chrono::duration_cast<std::chrono::microseconds>(t.time_since_epoch()).count();
  auto epoch = dt.attr("datetime")(1970, 1, 1, py::arg("tzinfo") = dt.attr("timezone").attr("utc"));
  return epoch + dt.attr("timedelta")(py::arg("microseconds") = us);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Ground station core: configuration, registry, telemetry, logs and the station server";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<CommandTableError>(m, "CommandTableError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<UnknownCommand>(m, "UnknownCommand", PyExc_KeyError);

  py::enum_<HttpMethod>(m, "HttpMethod").value("GET", HttpMethod::Get).value("POST", HttpMethod::Post);

  py::class_<CommandSpec>(m, "CommandSpec")
      .def_readonly("code", &CommandSpec::code)
      .def_readonly("endpoint", &CommandSpec::endpoint)
      .def_readonly("method", &CommandSpec::method)
      .def("__repr__", [](const CommandSpec& c) {
        return "CommandSpec(" + std::to_string(c.code) + ", '" + c.endpoint + "', " +
               std::string(to_string(c.method)) + ")";
      });

  py::class_<StationConfig>(m, "StationConfig")
      .def(py::init<>())
      .def_readwrite("serial_port", &StationConfig::serial_port)
      .def_readwrite("serial_baudrate", &StationConfig::serial_baudrate)
      .def_readwrite("serial_available", &StationConfig::serial_available)
      .def_readwrite("station_base_url", &StationConfig::station_base_url)
      .def_readwrite("telemetry_path", &StationConfig::telemetry_path)
      .def_property_readonly("secs_inactive", [](const StationConfig& c) { return c.secs_inactive.count(); })
      .def_property_readonly("secs_on_hold", [](const StationConfig& c) { return c.secs_on_hold.count(); })
      .def_property_readonly("update_delay", [](const StationConfig& c) { return c.update_delay.count(); })
      .def_readonly("commands", &StationConfig::commands)
      .def("find_command", &StationConfig::find_command, py::return_value_policy::reference_internal)
      .def("to_ini", [](const StationConfig& c) { return to_ini(c); })
      .def(py::self == py::self);

  m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));
  m.def("load_config", [](const std::filesystem::path& p) { return load_config(p); }, py::arg("path"));
  m.def("parse_command_row", &parse_command_row, py::arg("key"), py::arg("value"));
  m.def("default_command_table", &default_command_table);

  py::enum_<DeviceStatus>(m, "DeviceStatus")
      .value("ACTIVE", DeviceStatus::Active)
      .value("ON_HOLD", DeviceStatus::OnHold)
      .value("INACTIVE", DeviceStatus::Inactive)
      .def_property_readonly("wire", [](DeviceStatus s) { return std::string(to_wire(s)); });

  m.def(
      "classify",
      [](double age_s, double on_hold_s, double inactive_s) {
        return classify(seconds_to_ns(age_s), {seconds_to_ns(on_hold_s), seconds_to_ns(inactive_s)});
      },
      py::arg("age"), py::arg("on_hold") = 25.0, py::arg("inactive") = 50.0,
      "Liveness status for a device last seen `age` seconds ago.");

  py::class_<TelemetryMessage>(m, "TelemetryMessage")
      .def(py::init<>())
      .def_readwrite("id", &TelemetryMessage::id)
      .def_readwrite("lat", &TelemetryMessage::lat)
      .def_readwrite("lng", &TelemetryMessage::lng)
      .def_readwrite("alt", &TelemetryMessage::alt)
      .def_readwrite("address", &TelemetryMessage::address)
      .def_readwrite("device_kind", &TelemetryMessage::device_kind)
      .def_readwrite("seq", &TelemetryMessage::seq)
      .def_readwrite("msg_type", &TelemetryMessage::msg_type)
      .def_readwrite("device_time", &TelemetryMessage::device_time)
      .def("to_json", [](const TelemetryMessage& t) { return to_json_body(t); })
      .def("to_form", [](const TelemetryMessage& t) { return to_form_body(t); })
      .def(py::self == py::self);

  m.def("parse_telemetry", &parse_telemetry, py::arg("body"), py::arg("content_type") = "");
  m.def("normalize_address", &normalize_address, py::arg("address"));

  py::class_<DeviceRecord>(m, "DeviceRecord")
      .def_readonly("id", &DeviceRecord::id)
      .def_readonly("device_kind", &DeviceRecord::device_kind)
      .def_readonly("lat", &DeviceRecord::lat)
      .def_readonly("lng", &DeviceRecord::lng)
      .def_readonly("alt", &DeviceRecord::alt)
      .def_readonly("address", &DeviceRecord::address)
      .def_readonly("seq", &DeviceRecord::seq)
      .def_readonly("status", &DeviceRecord::status);

  // Times are seconds on an arbitrary monotonic axis chosen by the caller.
  py::class_<Registry>(m, "Registry")
      .def(py::init([](double on_hold, double inactive) {
             return std::make_unique<Registry>(
                 LivenessThresholds{seconds_to_ns(on_hold), seconds_to_ns(inactive)});
           }),
           py::arg("on_hold") = 25.0, py::arg("inactive") = 50.0)
      .def(
          "update",
          [](Registry& r, const TelemetryMessage& msg, double now) {
            return r.register_or_update(msg, SteadyTime{} + seconds_to_ns(now));
          },
          py::arg("message"), py::arg("now"))
      .def(
          "snapshot", [](const Registry& r, double now) { return r.snapshot(SteadyTime{} + seconds_to_ns(now)); },
          py::arg("now"))
      .def("lookup", &Registry::lookup, py::arg("id"))
      .def("__len__", &Registry::size)
      .def_property_readonly("thresholds", [](const Registry& r) {
        return py::make_tuple(to_seconds(r.thresholds().on_hold), to_seconds(r.thresholds().inactive));
      });

  m.def(
      "build_command_url",
      [](const std::string& address, const std::string& endpoint) {
        return build_command_url(address, CommandSpec{0, endpoint, HttpMethod::Get});
      },
      py::arg("address"), py::arg("endpoint"));

  py::class_<LogEvent>(m, "LogEvent")
      .def(py::init([](const py::object& ts, std::string source, std::string origin,
                       std::string payload) {
             return LogEvent{std::chrono::floor<std::chrono::milliseconds>(to_wall(ts)), std::move(source),
                             std::move(origin), std::move(payload)};
           }),
           py::arg("ts"), py::arg("source"), py::arg("origin"), py::arg("payload"))
      .def_property_readonly("ts", [](const LogEvent& e) { return to_datetime(WallTime(e.ts)); })
      .def_readonly("source", &LogEvent::source)
      .def_readonly("origin", &LogEvent::origin)
      .def_readonly("payload", &LogEvent::payload)
      .def(py::self == py::self);

  m.def("format_log_line", &format_log_line, py::arg("event"));
  m.def("parse_log_line", &parse_log_line, py::arg("line"));
  m.def(
      "parse_log_file",
      [](const std::filesystem::path& p) {
        auto parsed = parse_log_file(p);
        std::vector<std::pair<std::size_t, std::string>> bad;
        for (auto& b : parsed.malformed) bad.emplace_back(b.line_number, b.text);
        return py::make_tuple(parsed.events, bad);
      },
      py::arg("path"), "Returns (events, [(line_number, text), ...]).");
  m.def(
      "log_file_name",
      [](const std::string& module, const py::object& created, int index) {
        return log_file_name(module, to_wall(created), index);
      },
      py::arg("module"), py::arg("created"), py::arg("collision_index") = 0);

  py::class_<EventLog>(m, "EventLog")
      .def(py::init([](const std::filesystem::path& dir, const std::string& module) {
             return std::make_unique<EventLog>(dir, module);
           }),
           py::arg("directory"), py::arg("module") = "gs")
      .def("log_info", &EventLog::log_info, py::arg("source"), py::arg("payload"), py::arg("origin"))
      .def_property_readonly("path", &EventLog::path)
      .def_property_readonly("lines_written", &EventLog::lines_written);

  py::class_<Station>(m, "Station")
      .def(py::init([](const StationConfig& cfg, const std::string& bind, const std::filesystem::path& log_dir,
                       double time_scale, double cmd_timeout) {
             StationOptions o;
             o.config = cfg;
             o.bind = parse_bind(bind);
             o.log_dir = log_dir;
             o.time_scale = time_scale;
             o.cmd_timeout = std::chrono::milliseconds(static_cast<long long>(cmd_timeout * 1000));
             return std::make_unique<Station>(std::move(o));
           }),
           py::arg("config") = StationConfig{}, py::arg("bind") = "127.0.0.1:0",
           py::arg("log_dir") = "logs", py::arg("time_scale") = 1.0, py::arg("cmd_timeout") = 2.0)
      .def("start", &Station::start, py::call_guard<py::gil_scoped_release>())
      .def("stop", &Station::stop, py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("port", &Station::port)
      .def_property_readonly("base_url", &Station::base_url)
      .def_property_readonly("log_path", [](Station& s) { return s.log().path(); })
      .def("health", &Station::health_json)
      .def("__enter__", [](Station& s) -> Station& {
        py::gil_scoped_release release;
        s.start();
        return s;
      })
      .def("__exit__", [](Station& s, py::args) {
        py::gil_scoped_release release;
        s.stop();
      });

  py::class_<sim::SimDevice>(m, "SimDevice")
      .def(py::init([](std::int64_t id, const std::string& station_url, std::uint16_t port, double period) {
             sim::DeviceOptions o;
             o.id = id;
             o.port = port;
             o.station_url = station_url;
             o.period = std::chrono::milliseconds(static_cast<long long>(period * 1000));
             return std::make_unique<sim::SimDevice>(std::move(o));
           }),
           py::arg("id"), py::arg("station_url"), py::arg("port") = 0, py::arg("period") = 5.0)
      .def("start", &sim::SimDevice::start, py::call_guard<py::gil_scoped_release>())
      .def("stop", &sim::SimDevice::stop, py::call_guard<py::gil_scoped_release>())
      .def("pause", &sim::SimDevice::pause)
      .def("resume", &sim::SimDevice::resume)
      .def("hits", py::overload_cast<>(&sim::SimDevice::hits, py::const_))
      .def_property_readonly("address", &sim::SimDevice::address)
      .def_property_readonly("port", &sim::SimDevice::port)
      .def_property_readonly("telemetry_sent", &sim::SimDevice::telemetry_sent);
}
