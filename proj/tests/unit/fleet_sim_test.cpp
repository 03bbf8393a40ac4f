// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <httplib.h>
#include <json.hpp>

#include "groundstation/fleet_sim.hpp"
#include "test_support.hpp"

namespace gs::sim {
namespace {

using namespace std::chrono_literals;

double haversine_m(double lat1, double lng1, double lat2, double lng2) {
  const double r = 6371008.8;
  const double d2r = std::numbers::pi / 180.0;
  double dlat = (lat2 - lat1) * d2r, dlng = (lng2 - lng1) * d2r;
  double a = std::pow(std::sin(dlat / 2), 2) +
             std::cos(lat1 * d2r) * std::cos(lat2 * d2r) * std::pow(std::sin(dlng / 2), 2);
  return 2 * r * std::asin(std::sqrt(a));
}

TEST(MotionTest, Parse) {
  EXPECT_TRUE(std::holds_alternative<FixedMotion>(parse_motion("fixed")));
  auto c = std::get<CircleMotion>(parse_motion("circle:50:0.1"));
  EXPECT_DOUBLE_EQ(c.radius_m, 50);
  EXPECT_DOUBLE_EQ(c.angular_speed, 0.1);
  EXPECT_THROW(parse_motion("circle:50"), ParseError);
  EXPECT_THROW(parse_motion("circle:x:1"), ParseError);
  EXPECT_THROW(parse_motion("circle:-1:1"), ParseError);
  EXPECT_THROW(parse_motion("zigzag"), ParseError);
}

TEST(MotionTest, CircleStaysOnRadius) {
  GeoPosition center;
  CircleMotion c{120.0, 0.3};
  for (double t = 0; t < 40; t += 0.7) {
    auto p = position_at(center, c, t);
    EXPECT_NEAR(haversine_m(center.lat, center.lng, p.lat, p.lng), 120.0, 0.05) << t;
  }
  // Quarter turn moves from due east to due north.
  auto east = position_at(center, c, 0);
  auto north = position_at(center, c, std::numbers::pi / 2 / 0.3);
  EXPECT_NEAR(east.lat, center.lat, 1e-9);
  EXPECT_GT(east.lng, center.lng);
  EXPECT_NEAR(north.lng, center.lng, 1e-9);
  EXPECT_GT(north.lat, center.lat);
}

TEST(MotionTest, FixedNeverMoves) {
  GeoPosition center{10, 20, 30};
  auto p = position_at(center, FixedMotion{}, 123.0);
  EXPECT_EQ(p.lat, 10);
  EXPECT_EQ(p.lng, 20);
  EXPECT_EQ(p.alt, 30);
}

TEST(SimDeviceTest, CountsCommandHits) {
  DeviceOptions o;
  o.id = 21;
  o.port = 0;
  o.station_url = "http://127.0.0.1:1/";
  o.period = 1h;
  SimDevice dev(o);
  dev.start();
  httplib::Client c("127.0.0.1", dev.port());
  for (auto ep : kCommandEndpoints) {
    auto res = c.Get("/" + std::string(ep));
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(nlohmann::json::parse(res->body)["ack"], ep);
  }
  ASSERT_TRUE(c.Post("/rtl", "{}", "application/json"));
  EXPECT_EQ(dev.hits("rtl"), 2);
  EXPECT_EQ(dev.hits("auto"), 1);
  auto hits = nlohmann::json::parse(c.Get("/_hits")->body);
  EXPECT_EQ(hits["rtl"], 2);
  EXPECT_EQ(hits.size(), kCommandEndpoints.size());
  EXPECT_EQ(c.Get("/unknown")->status, 404);

  c.Get("/_pause");
  EXPECT_TRUE(dev.paused());
  c.Get("/_resume");
  EXPECT_FALSE(dev.paused());
}

TEST(SimDeviceTest, PostsFormTelemetry) {
  std::mutex m;
  std::vector<httplib::Params> posts;
  httplib::Server station;
  station.Post("/update-info/", [&](const httplib::Request& req, httplib::Response& res) {
    EXPECT_EQ(req.get_header_value("Content-Type"), "application/x-www-form-urlencoded");
    httplib::Params p;
    httplib::detail::parse_query_text(req.body, p);
    std::lock_guard lock(m);
    posts.push_back(p);
    res.set_content("{}", "application/json");
  });
  int port = station.bind_to_any_port("127.0.0.1");
  std::thread t([&] { station.listen_after_bind(); });
  station.wait_until_ready();

  DeviceOptions o;
  o.id = 4;
  o.port = 0;
  o.station_url = "http://127.0.0.1:" + std::to_string(port);
  o.period = 50ms;
  SimDevice dev(o);
  dev.start();
  ASSERT_TRUE(test::wait_until(
      [&] {
        std::lock_guard lock(m);
        return posts.size() >= 3;
      },
      2000ms));
  dev.pause();
  std::this_thread::sleep_for(100ms);
  std::size_t frozen;
  {
    std::lock_guard lock(m);
    frozen = posts.size();
  }
  std::this_thread::sleep_for(200ms);
  {
    std::lock_guard lock(m);
    EXPECT_EQ(posts.size(), frozen);
    auto& first = posts[0];
    EXPECT_EQ(first.find("id")->second, "4");
    EXPECT_EQ(first.find("ip")->second, dev.address());
    EXPECT_EQ(first.find("seq")->second, "0");
    EXPECT_EQ(posts[1].find("seq")->second, "1");
  }
  EXPECT_GE(dev.telemetry_sent(), 3u);
  dev.stop();
  station.stop();
  t.join();
}

TEST(SimDeviceTest, PortConflictThrows) {
  DeviceOptions o;
  o.port = 0;
  o.period = 1h;
  SimDevice a(o);
  a.start();
  DeviceOptions o2 = o;
  o2.port = a.port();
  SimDevice b(o2);
  EXPECT_THROW(b.start(), IoError);
}

TEST(FleetTest, IdsPortsAndSpacing) {
  FleetOptions f;
  f.count = 3;
  f.first_id = 10;
  f.base_port = 0;
  f.period = 1h;
  f.station_url = "http://127.0.0.1:1/";
  Fleet fleet(f);
  ASSERT_EQ(fleet.devices().size(), 3u);
  fleet.start();
  for (int i = 0; i < 3; ++i) {
    auto& d = fleet.device(i);
    EXPECT_EQ(d.id(), 10 + i);
    auto msg = d.telemetry_at(0, 0);
    EXPECT_NEAR(msg.lng, f.origin.lng + f.spacing_deg * i, 1e-12);
    EXPECT_EQ(msg.address, d.address());
  }
  fleet.stop();
  FleetOptions empty;
  empty.count = 0;
  EXPECT_THROW(Fleet{empty}, ValidationError);
}

}  // namespace
}  // namespace gs::sim
