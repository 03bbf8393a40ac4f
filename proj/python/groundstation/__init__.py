# Copyright 2026 The GrADyS Ground Station Authors
# SPDX-License-Identifier: Apache-2.0
"""Python bindings for the ground station core."""

from ._core import (
    CommandSpec,
    CommandTableError,
    DeviceRecord,
    DeviceStatus,
    EventLog,
    HttpMethod,
    IoError,
    LogEvent,
    ParseError,
    Registry,
    SimDevice,
    Station,
    StationConfig,
    TelemetryMessage,
    UnknownCommand,
    ValidationError,
    build_command_url,
    classify,
    default_command_table,
    format_log_line,
    load_config,
    log_file_name,
    normalize_address,
    parse_command_row,
    parse_config,
    parse_log_file,
    parse_log_line,
    parse_telemetry,
)

__version__ = "1.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
