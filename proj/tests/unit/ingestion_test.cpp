// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <json.hpp>

#include "groundstation/ingestion.hpp"
#include "test_support.hpp"

namespace gs {
namespace {

using nlohmann::json;

class IngestionTest : public ::testing::Test {
 protected:
  IngestionTest()
      : log(dir.path(), "gs"),
        registry(LivenessThresholds::from_config(cfg)),
        service(cfg, registry, log, SystemClock::instance(),
                [this](const UiEnvelope& env) { forwarded.push_back(env); }) {}

  test::TempDir dir;
  StationConfig cfg;
  EventLog log;
  Registry registry;
  std::vector<UiEnvelope> forwarded;
  IngestionService service;
};

TEST_F(IngestionTest, Route) { EXPECT_EQ(service.route(), "/update-info/"); }

TEST_F(IngestionTest, AcceptsFormPost) {
  auto res = service.handle_telemetry_request(
      "POST", "/update-info/", "id=21&lat=-15.84&lng=-47.92&alt=3&ip=127.0.0.1:5071&seq=2",
      "application/x-www-form-urlencoded");
  EXPECT_EQ(res.status, 200);
  EXPECT_EQ(json::parse(res.body), (json{{"status", "ok"}, {"id", 21}}));
  ASSERT_EQ(registry.size(), 1u);
  EXPECT_EQ(registry.lookup(21)->address, "http://127.0.0.1:5071/");
  ASSERT_EQ(forwarded.size(), 1u);
  EXPECT_EQ(forwarded[0].kind, EnvelopeKind::DeviceUpdate);
  EXPECT_EQ(forwarded[0].payload["id"], 21);
  EXPECT_EQ(forwarded[0].payload["method"], "post");

  auto events = parse_log_file(log.path()).events;
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].source, "uav-21");
  EXPECT_EQ(events[0].origin, "receive-info");
  EXPECT_EQ(json::parse(events[0].payload)["lat"], -15.84);
}

TEST_F(IngestionTest, AcceptsJsonPost) {
  auto res = service.handle_telemetry_request(
      "POST", "/update-info/", R"({"id":3,"lat":1,"lng":2,"alt":3,"ip":"h:1","device":"ugv"})",
      "application/json");
  EXPECT_EQ(res.status, 200);
  EXPECT_EQ(parse_log_file(log.path()).events[0].source, "ugv-3");
}

TEST_F(IngestionTest, RejectsBadRequests) {
  EXPECT_EQ(service.handle_telemetry_request("POST", "/other/", "", "").status, 404);
  EXPECT_EQ(service.handle_telemetry_request("GET", "/update-info/", "", "").status, 405);
  auto bad = service.handle_telemetry_request("POST", "/update-info/", "id=1", "");
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(json::parse(bad.body)["status"], "error");
  EXPECT_EQ(registry.size(), 0u);
  EXPECT_TRUE(forwarded.empty());
  auto events = parse_log_file(log.path()).events;
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].origin, "receive-error");
}

TEST_F(IngestionTest, ForwardFailureIsLogged) {
  IngestionService throwing(cfg, registry, log, SystemClock::instance(),
                            [](const UiEnvelope&) { throw std::runtime_error("hub down"); });
  TelemetryMessage m;
  m.id = 8;
  m.address = "http://h:1/";
  auto rec = throwing.accept(m, "serial");
  EXPECT_EQ(rec.id, 8);
  auto events = parse_log_file(log.path()).events;
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[1].origin, "exception");
}

TEST(DeviceSourceTest, KindAndId) {
  TelemetryMessage m;
  m.id = 21;
  EXPECT_EQ(device_source(m), "uav-21");
  m.device_kind = "ugv";
  EXPECT_EQ(device_source(m), "ugv-21");
}

}  // namespace
}  // namespace gs
