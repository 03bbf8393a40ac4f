// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include "groundstation/dispatcher.hpp"

#include <condition_variable>
#include <future>
#include <thread>

namespace gs {

TargetSelector selector_from_wire(std::int64_t id) {
  if (id == kAllDevicesId) return AllDevices{};
  return SingleDevice{id};
}

std::int64_t selector_to_wire(const TargetSelector& target) {
  if (const auto* single = std::get_if<SingleDevice>(&target)) return single->id;
  return kAllDevicesId;
}

std::string_view to_wire(SendResult result) {
  switch (result) {
    case SendResult::Sent:
      return "sent";
    case SendResult::HttpError:
      return "http-error";
    case SendResult::Unreachable:
      return "unreachable";
    case SendResult::UnknownDevice:
      return "unknown-device";
  }
  return "unreachable";
}

nlohmann::ordered_json to_json(const DispatchOutcome& outcome) {
  nlohmann::ordered_json targets = nlohmann::ordered_json::array();
  for (const auto& t : outcome.targets) {
    nlohmann::ordered_json j;
    j["device_id"] = t.device_id;
    j["url"] = t.url;
    j["method"] = to_string(t.method);
    j["result"] = to_wire(t.result);
    if (t.http_status != 0) j["http_status"] = t.http_status;
    if (!t.detail.empty()) j["detail"] = t.detail;
    targets.push_back(std::move(j));
  }
  nlohmann::ordered_json j;
  j["code"] = outcome.code;
  j["targets"] = std::move(targets);
  return j;
}

UnknownCommand::UnknownCommand(int code)
    : std::runtime_error("unknown command code " + std::to_string(code)), code_(code) {}

std::string build_command_url(std::string_view device_address, const CommandSpec& spec) {
  std::string joined(device_address);
  if (!joined.ends_with('/')) joined.push_back('/');
  joined += spec.endpoint;

  // Collapse runs of '/' everywhere past the scheme separator.
  auto scheme = joined.find("://");
  std::size_t start = scheme == std::string::npos ? 0 : scheme + 3;
  std::string out = joined.substr(0, start);
  for (std::size_t i = start; i < joined.size(); ++i) {
    if (joined[i] == '/' && !out.empty() && out.back() == '/' && out.size() > start) continue;
    out.push_back(joined[i]);
  }
  return out;
}

struct Dispatcher::Repeat {
  std::mutex mutex;
  std::condition_variable_any cv;
  std::jthread thread;

  void stop() {
    std::lock_guard lock(mutex);
    if (thread.joinable()) {
      thread.request_stop();
      thread.join();
    }
  }
};

Dispatcher::Dispatcher(const StationConfig& cfg, const Registry& registry, EventLog& log,
                       HttpTransport& transport, std::chrono::milliseconds timeout)
    : cfg_(cfg), registry_(registry), log_(log), transport_(transport), timeout_(timeout) {}

Dispatcher::~Dispatcher() { stop_all(); }

const CommandSpec& Dispatcher::require(int code) const {
  const auto* spec = cfg_.find_command(code);
  if (!spec) throw UnknownCommand(code);
  return *spec;
}

DispatchOutcome Dispatcher::dispatch(const CommandRequest& req) const {
  const auto& spec = require(req.code);
  DispatchOutcome outcome;
  outcome.code = req.code;

  std::vector<DeviceRecord> targets;
  if (const auto* single = std::get_if<SingleDevice>(&req.target)) {
    if (auto rec = registry_.lookup(single->id)) {
      targets.push_back(std::move(*rec));
    } else {
      outcome.targets.push_back({single->id, "", spec.method, SendResult::UnknownDevice, 0,
                                 "device " + std::to_string(single->id) + " is not registered"});
      return outcome;
    }
  } else {
    targets = registry_.snapshot(std::chrono::steady_clock::now());
  }

  std::string body;
  if (spec.method == HttpMethod::Post) {
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : req.params) params[k] = v;
    body = params.dump();
  }
  const std::string origin = spec.method == HttpMethod::Get ? "send-get" : "send-post";

  std::vector<std::future<TargetOutcome>> pending;
  pending.reserve(targets.size());
  for (const auto& rec : targets) {
    auto url = build_command_url(rec.address, spec);
    log_.log_info("gs", url, origin);
    pending.push_back(std::async(std::launch::async, [this, &spec, &body, id = rec.id, url] {
      TargetOutcome out{id, url, spec.method, SendResult::Sent, 0, {}};
      auto reply = transport_.send(spec.method, url, body, timeout_);
      if (!reply.status) {
        out.result = SendResult::Unreachable;
        out.detail = reply.error;
      } else {
        out.http_status = *reply.status;
        if (*reply.status < 200 || *reply.status >= 300) out.result = SendResult::HttpError;
      }
      return out;
    }));
  }

  for (auto& f : pending) {
    auto out = f.get();
    if (out.result == SendResult::Unreachable) {
      log_.log_exception("sending " + out.url,
                         std::make_exception_ptr(std::runtime_error(out.detail)));
    } else if (out.result == SendResult::HttpError) {
      log_.log_exception("sending " + out.url,
                         std::make_exception_ptr(std::runtime_error(
                             "HTTP status " + std::to_string(out.http_status))));
    }
    outcome.targets.push_back(std::move(out));
  }
  return outcome;
}

RepeatHandle Dispatcher::start_repeating(const CommandRequest& req,
                                         std::chrono::nanoseconds interval, TickObserver on_tick) {
  require(req.code);
  if (interval <= std::chrono::nanoseconds::zero()) {
    throw ValidationError("repeat interval must be positive");
  }

  auto repeat = std::make_shared<Repeat>();
  auto* raw = repeat.get();
  raw->thread = std::jthread([this, raw, req, interval, on_tick = std::move(on_tick)](
                                 std::stop_token st) {
    auto next = std::chrono::steady_clock::now();
    std::mutex wait_mutex;
    while (!st.stop_requested()) {
      try {
        auto outcome = dispatch(req);
        if (on_tick) on_tick(outcome);
      } catch (...) {
        log_.log_exception("repeating command " + std::to_string(req.code));
      }
      next += interval;
      std::unique_lock lock(wait_mutex);
      raw->cv.wait_until(lock, st, next, [] { return false; });
    }
  });

  std::lock_guard lock(repeats_mutex_);
  RepeatHandle handle{next_handle_++};
  repeats_.emplace(handle, std::move(repeat));
  return handle;
}

void Dispatcher::stop_repeating(RepeatHandle handle) {
  std::shared_ptr<Repeat> repeat;
  {
    std::lock_guard lock(repeats_mutex_);
    auto it = repeats_.find(handle);
    if (it == repeats_.end()) return;
    repeat = it->second;
  }
  repeat->stop();
  std::lock_guard lock(repeats_mutex_);
  repeats_.erase(handle);
}

void Dispatcher::stop_all() {
  std::vector<RepeatHandle> handles;
  {
    std::lock_guard lock(repeats_mutex_);
    for (const auto& [h, _] : repeats_) handles.push_back(h);
  }
  for (auto h : handles) stop_repeating(h);
}

std::size_t Dispatcher::active_repeats() const {
  std::lock_guard lock(repeats_mutex_);
  return repeats_.size();
}

}  // namespace gs
