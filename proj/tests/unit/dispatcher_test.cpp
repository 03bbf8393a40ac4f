// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <json.hpp>

#include "fakes.hpp"
#include "groundstation/dispatcher.hpp"
#include "groundstation/fleet_sim.hpp"
#include "test_support.hpp"

namespace gs {
namespace {

using namespace std::chrono_literals;

TEST(BuildUrlTest, JoinsWithSingleSlash) {
  CommandSpec rtl{30, "rtl", HttpMethod::Get};
  EXPECT_EQ(build_command_url("http://127.0.0.1:5071/", rtl), "http://127.0.0.1:5071/rtl");
  EXPECT_EQ(build_command_url("http://127.0.0.1:5071", rtl), "http://127.0.0.1:5071/rtl");
  EXPECT_EQ(build_command_url("http://h:1//base//", rtl), "http://h:1/base/rtl");
}

TEST(SelectorTest, Wire) {
  EXPECT_EQ(selector_from_wire(-1), TargetSelector{AllDevices{}});
  EXPECT_EQ(selector_from_wire(7), TargetSelector{SingleDevice{7}});
  EXPECT_EQ(selector_to_wire(AllDevices{}), -1);
  EXPECT_EQ(selector_to_wire(SingleDevice{3}), 3);
  EXPECT_EQ(to_wire(SendResult::HttpError), "http-error");
}

class DispatcherTest : public ::testing::Test {
 protected:
  DispatcherTest() : log(dir.path(), "gs"), registry(LivenessThresholds::from_config(cfg)) {
    cfg.commands[40] = {40, "goto", HttpMethod::Post};
  }

  void add(std::int64_t id, const std::string& address) {
    TelemetryMessage m;
    m.id = id;
    m.address = address;
    registry.register_or_update(m, std::chrono::steady_clock::now());
  }

  std::vector<LogEvent> events() { return parse_log_file(log.path()).events; }

  test::TempDir dir;
  StationConfig cfg;
  EventLog log;
  Registry registry;
  test::FakeTransport transport;
};

TEST_F(DispatcherTest, SingleTargetGet) {
  add(21, "http://127.0.0.1:5071/");
  Dispatcher d(cfg, registry, log, transport);
  auto out = d.dispatch({SingleDevice{21}, 30, {}});
  ASSERT_EQ(out.targets.size(), 1u);
  EXPECT_EQ(out.targets[0].result, SendResult::Sent);
  EXPECT_EQ(out.targets[0].http_status, 200);
  auto reqs = transport.requests();
  ASSERT_EQ(reqs.size(), 1u);
  EXPECT_EQ(reqs[0].method, HttpMethod::Get);
  EXPECT_EQ(reqs[0].url, "http://127.0.0.1:5071/rtl");
  auto ev = events();
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(format_log_line(ev[0]).substr(23), "; gs; send-get; http://127.0.0.1:5071/rtl");
}

TEST_F(DispatcherTest, PostCarriesParams) {
  add(1, "http://10.0.0.1:5000/");
  Dispatcher d(cfg, registry, log, transport);
  d.dispatch({SingleDevice{1}, 40, {{"lat", "1.5"}, {"lng", "2"}}});
  auto reqs = transport.requests();
  ASSERT_EQ(reqs.size(), 1u);
  EXPECT_EQ(reqs[0].method, HttpMethod::Post);
  auto body = nlohmann::json::parse(reqs[0].body);
  EXPECT_EQ(body["lat"], "1.5");
  EXPECT_EQ(events()[0].origin, "send-post");
}

TEST_F(DispatcherTest, AllDevicesFansOut) {
  add(1, "http://10.0.0.1:5000/");
  add(2, "http://10.0.0.2:5000/");
  add(3, "http://10.0.0.3:5000/");
  Dispatcher d(cfg, registry, log, transport);
  auto out = d.dispatch({AllDevices{}, 24, {}});
  ASSERT_EQ(out.targets.size(), 3u);
  std::set<std::string> urls;
  for (const auto& r : transport.requests()) urls.insert(r.url);
  EXPECT_EQ(urls, (std::set<std::string>{"http://10.0.0.1:5000/auto", "http://10.0.0.2:5000/auto",
                                          "http://10.0.0.3:5000/auto"}));
}

TEST_F(DispatcherTest, UnknownCodeDoesNoIo) {
  add(1, "http://10.0.0.1:5000/");
  Dispatcher d(cfg, registry, log, transport);
  EXPECT_THROW(d.dispatch({SingleDevice{1}, 99, {}}), UnknownCommand);
  EXPECT_THROW(d.start_repeating({SingleDevice{1}, 99, {}}, 100ms), UnknownCommand);
  EXPECT_THROW(d.start_repeating({SingleDevice{1}, 30, {}}, 0ms), ValidationError);
  EXPECT_TRUE(transport.requests().empty());
  EXPECT_TRUE(events().empty());
}

TEST_F(DispatcherTest, UnknownDevice) {
  Dispatcher d(cfg, registry, log, transport);
  auto out = d.dispatch({SingleDevice{9}, 30, {}});
  ASSERT_EQ(out.targets.size(), 1u);
  EXPECT_EQ(out.targets[0].result, SendResult::UnknownDevice);
  EXPECT_TRUE(transport.requests().empty());
}

TEST_F(DispatcherTest, FailuresAreReportedAndLogged) {
  add(1, "http://10.0.0.1:5000/");
  add(2, "http://10.0.0.2:5000/");
  transport.replies["http://10.0.0.1:5000/rtl"] = HttpReply{std::nullopt, "", "connection refused"};
  transport.replies["http://10.0.0.2:5000/rtl"] = HttpReply{500, "", ""};
  Dispatcher d(cfg, registry, log, transport);
  auto out = d.dispatch({AllDevices{}, 30, {}});
  ASSERT_EQ(out.targets.size(), 2u);
  EXPECT_EQ(out.targets[0].result, SendResult::Unreachable);
  EXPECT_EQ(out.targets[0].detail, "connection refused");
  EXPECT_EQ(out.targets[1].result, SendResult::HttpError);
  EXPECT_EQ(out.targets[1].http_status, 500);
  int exceptions = 0;
  for (const auto& e : events()) exceptions += e.origin == "exception";
  EXPECT_EQ(exceptions, 2);
  auto j = to_json(out);
  EXPECT_EQ(j["targets"][0]["result"], "unreachable");
  EXPECT_EQ(j["targets"][1]["http_status"], 500);
}

TEST_F(DispatcherTest, RealDeviceAndUnreachablePort) {
  BlockingHttpTransport http;
  sim::DeviceOptions opts;
  opts.id = 5;
  opts.port = 0;
  opts.station_url = "http://127.0.0.1:1/";
  opts.period = 1h;
  sim::SimDevice device(opts);
  device.start();
  add(5, device.address());
  add(6, "http://127.0.0.1:1/");
  Dispatcher d(cfg, registry, log, http, 500ms);
  auto out = d.dispatch({AllDevices{}, 30, {}});
  ASSERT_EQ(out.targets.size(), 2u);
  EXPECT_EQ(out.targets[0].result, SendResult::Sent);
  EXPECT_EQ(out.targets[1].result, SendResult::Unreachable);
  EXPECT_EQ(device.hits("rtl"), 1);
}

TEST_F(DispatcherTest, RepeatScheduleAndStop) {
  add(1, "http://10.0.0.1:5000/");
  Dispatcher d(cfg, registry, log, transport);
  std::atomic<int> ticks{0};
  auto h = d.start_repeating({SingleDevice{1}, 30, {}}, 100ms, [&](const DispatchOutcome& o) {
    EXPECT_EQ(o.code, 30);
    ++ticks;
  });
  EXPECT_EQ(d.active_repeats(), 1u);
  std::this_thread::sleep_for(550ms);
  d.stop_repeating(h);
  int at_stop = ticks.load();
  EXPECT_GE(at_stop, 5);
  EXPECT_LE(at_stop, 7);
  std::this_thread::sleep_for(300ms);
  EXPECT_EQ(ticks.load(), at_stop);
  EXPECT_EQ(transport.requests().size(), static_cast<std::size_t>(at_stop));
  EXPECT_EQ(d.active_repeats(), 0u);
  d.stop_repeating(h);
}

TEST_F(DispatcherTest, RepeatTargetsResolvedEachTick) {
  Dispatcher d(cfg, registry, log, transport);
  std::atomic<int> ticks{0};
  d.start_repeating({AllDevices{}, 24, {}}, 50ms, [&](const DispatchOutcome&) { ++ticks; });
  ASSERT_TRUE(test::wait_until([&] { return ticks >= 1; }, 1000ms));
  add(1, "http://10.0.0.1:5000/");
  ASSERT_TRUE(test::wait_until([&] { return !transport.requests().empty(); }, 1000ms));
  d.stop_all();
  EXPECT_EQ(d.active_repeats(), 0u);
}

TEST_F(DispatcherTest, DestructorStopsRepeats) {
  add(1, "http://10.0.0.1:5000/");
  {
    Dispatcher d(cfg, registry, log, transport);
    d.start_repeating({SingleDevice{1}, 30, {}}, 20ms);
    d.start_repeating({SingleDevice{1}, 24, {}}, 20ms);
    std::this_thread::sleep_for(60ms);
  }
  auto n = transport.requests().size();
  std::this_thread::sleep_for(100ms);
  EXPECT_EQ(transport.requests().size(), n);
}

}  // namespace
}  // namespace gs
