# Copyright 2026 The GrADyS Ground Station Authors
# SPDX-License-Identifier: Apache-2.0

import datetime as dt
import json
import time
import urllib.request

import pytest

import groundstation as gs


def test_default_config():
    cfg = gs.parse_config("")
    assert cfg.serial_port == "COM4"
    assert cfg.serial_baudrate == 115200
    assert (cfg.secs_on_hold, cfg.secs_inactive, cfg.update_delay) == (25, 50, 20)
    assert sorted(cfg.commands) == [20, 22, 24, 26, 28, 30, 32]
    assert cfg.find_command(30).endpoint == "rtl"
    assert cfg.find_command(99) is None
    assert gs.parse_config(cfg.to_ini()) == cfg


def test_config_errors():
    with pytest.raises(gs.CommandTableError):
        gs.parse_command_row("30", "rtl")
    with pytest.raises(gs.ValidationError):
        gs.parse_config("[list-updater]\nseconds_to_device_be_on_hold = 80\n")
    with pytest.raises(ValueError):
        gs.parse_config("no section\n")


def test_classify_and_registry():
    assert gs.classify(10) == gs.DeviceStatus.ACTIVE
    assert gs.classify(25) == gs.DeviceStatus.ON_HOLD
    assert gs.classify(50) == gs.DeviceStatus.INACTIVE
    assert gs.DeviceStatus.ON_HOLD.wire == "on-hold"

    reg = gs.Registry(0.25, 0.5)
    for seq in range(100):
        msg = gs.parse_telemetry(f"id=7&lat=1&lng=2&alt=3&ip=127.0.0.1:6007&seq={seq}")
        reg.update(msg, now=seq * 0.001)
    assert len(reg) == 1
    (rec,) = reg.snapshot(now=0.1)
    assert rec.seq == 99 and rec.status == gs.DeviceStatus.ACTIVE
    assert reg.snapshot(now=0.5)[0].status == gs.DeviceStatus.ON_HOLD
    assert reg.lookup(8) is None


def test_telemetry_round_trip():
    msg = gs.parse_telemetry(
        json.dumps({"id": 21, "lat": -15.84, "lng": -47.92, "alt": 4, "ip": "127.0.0.1:5071"}),
        "application/json",
    )
    assert msg.address == "http://127.0.0.1:5071/"
    assert gs.parse_telemetry(msg.to_form(), "application/x-www-form-urlencoded") == msg
    with pytest.raises(gs.ValidationError):
        gs.parse_telemetry('{"id":1,"lat":95,"lng":0,"alt":0,"ip":"h:1"}')


def test_command_url():
    assert gs.build_command_url("http://127.0.0.1:5071/", "rtl") == "http://127.0.0.1:5071/rtl"
    assert gs.build_command_url("http://127.0.0.1:5071", "rtl") == "http://127.0.0.1:5071/rtl"


def test_log_lines(tmp_path):
    ts = dt.datetime(2022, 1, 25, 20, 58, 50, 365000)
    ev = gs.LogEvent(ts, "gs", "send-get", "http://127.0.0.1:5071/rtl")
    line = gs.format_log_line(ev)
    assert line == "2022-01-25 20:58:50,365; gs; send-get; http://127.0.0.1:5071/rtl"
    assert gs.parse_log_line(line) == ev
    assert ev.ts == ts.replace(tzinfo=dt.timezone.utc)
    assert gs.parse_log_line("garbage") is None
    assert gs.log_file_name("gs", ts) == "gs-2022-01-25-20-58-50.log"

    log = gs.EventLog(tmp_path, "gs")
    log.log_info("uav-1", '{"id":1}', "receive-info")
    events, malformed = gs.parse_log_file(log.path)
    assert [e.origin for e in events] == ["receive-info"] and malformed == []


def test_station_with_sim_device(tmp_path):
    with gs.Station(log_dir=str(tmp_path / "logs")) as station:
        device = gs.SimDevice(21, station.base_url, period=0.05)
        device.start()
        try:
            deadline = time.time() + 3
            devices = []
            while time.time() < deadline and not devices:
                with urllib.request.urlopen(station.base_url + "devices", timeout=1) as r:
                    devices = json.load(r)
                time.sleep(0.02)
            assert devices and devices[0]["id"] == 21
            assert json.loads(station.health())["registry_size"] == 1
            with urllib.request.urlopen(station.base_url + "commands", timeout=1) as r:
                assert len(json.load(r)) == 7
        finally:
            device.stop()
    events, _ = gs.parse_log_file(station.log_path)
    assert events[0].origin == "startup"
    assert any(e.source == "uav-21" and e.origin == "receive-info" for e in events)
