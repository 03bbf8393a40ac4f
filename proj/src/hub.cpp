// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include "groundstation/hub.hpp"

#include <limits>
#include <vector>

#include <json.hpp>

namespace gs {

Outbox::Outbox(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

bool Outbox::push(Frame frame) {
  std::lock_guard lock(mutex_);
  bool kept_all = true;
  if (frames_.size() >= capacity_) {
    frames_.pop_front();
    ++dropped_;
    kept_all = false;
  }
  frames_.push_back(std::move(frame));
  return kept_all;
}

std::optional<Frame> Outbox::pop() {
  std::lock_guard lock(mutex_);
  if (frames_.empty()) return std::nullopt;
  auto f = std::move(frames_.front());
  frames_.pop_front();
  return f;
}

std::optional<Frame> Outbox::front() const {
  std::lock_guard lock(mutex_);
  if (frames_.empty()) return std::nullopt;
  return frames_.front();
}

std::size_t Outbox::size() const {
  std::lock_guard lock(mutex_);
  return frames_.size();
}

std::size_t Outbox::dropped() const {
  std::lock_guard lock(mutex_);
  return dropped_;
}

Hub::Hub(Warn warn) : warn_(std::move(warn)) {}

std::uint64_t Hub::attach(std::weak_ptr<Subscriber> subscriber) {
  std::lock_guard lock(mutex_);
  auto id = next_id_++;
  clients_.emplace(id, std::move(subscriber));
  return id;
}

void Hub::detach(std::uint64_t id) {
  std::lock_guard lock(mutex_);
  clients_.erase(id);
}

void Hub::broadcast(const UiEnvelope& env) {
  broadcast(std::make_shared<const std::string>(to_wire(env)));
}

void Hub::broadcast(Frame frame) {
  std::vector<std::shared_ptr<Subscriber>> live;
  {
    std::lock_guard lock(mutex_);
    for (auto it = clients_.begin(); it != clients_.end();) {
      if (auto s = it->second.lock()) {
        live.push_back(std::move(s));
        ++it;
      } else {
        it = clients_.erase(it);
      }
    }
  }
  for (auto& s : live) s->deliver(frame);
}

std::size_t Hub::client_count() const {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (const auto& [id, weak] : clients_) n += weak.expired() ? 0 : 1;
  return n;
}

void Hub::close_all() {
  std::vector<std::shared_ptr<Subscriber>> live;
  {
    std::lock_guard lock(mutex_);
    for (auto& [id, weak] : clients_) {
      if (auto s = weak.lock()) live.push_back(std::move(s));
    }
    clients_.clear();
  }
  for (auto& s : live) s->close();
}

void Hub::warn(const std::string& message) const {
  if (warn_) warn_(message);
}

UiCommandMessage parse_ui_command(std::string_view raw) {
  auto doc = nlohmann::json::parse(raw.begin(), raw.end(), nullptr, false);
  if (doc.is_discarded()) throw ParseError("command frame is not valid JSON");
  if (!doc.is_object()) throw ParseError("command frame must be a JSON object");

  auto integer = [&](const char* key) -> std::int64_t {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) throw ParseError(std::string("missing field '") + key + "'");
    if (!it->is_number_integer()) throw ParseError(std::string("field '") + key + "' must be an integer");
    return it->get<std::int64_t>();
  };

  UiCommandMessage msg;
  msg.id = integer("id");
  if (msg.id < kAllDevicesId) throw ParseError("field 'id' must be >= -1");
  auto type = integer("type");
  if (type < 0 || type > std::numeric_limits<int>::max()) {
    throw ParseError("field 'type' must be a non-negative command code");
  }
  msg.type = static_cast<int>(type);

  if (auto it = doc.find("params"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) throw ParseError("field 'params' must be an object");
    for (const auto& [k, v] : it->items()) {
      if (v.is_string()) {
        msg.params[k] = v.get<std::string>();
      } else if (v.is_primitive()) {
        msg.params[k] = v.dump();
      } else {
        throw ParseError("param '" + k + "' must be a scalar");
      }
    }
  }

  if (auto it = doc.find("repeat"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) throw ParseError("field 'repeat' must be an object");
    UiCommandMessage::Repeat repeat;
    auto action = it->find("action");
    if (action == it->end() || !action->is_string()) {
      throw ParseError("field 'repeat.action' must be \"start\" or \"stop\"");
    }
    if (*action == "start") {
      repeat.start = true;
    } else if (*action == "stop") {
      repeat.start = false;
    } else {
      throw ParseError("field 'repeat.action' must be \"start\" or \"stop\"");
    }
    if (auto iv = it->find("interval_ms"); iv != it->end() && !iv->is_null()) {
      if (!iv->is_number_integer() || iv->get<std::int64_t>() <= 0) {
        throw ParseError("field 'repeat.interval_ms' must be a positive integer");
      }
      repeat.interval = std::chrono::milliseconds{iv->get<std::int64_t>()};
    }
    msg.repeat = repeat;
  }
  return msg;
}

CommandRouter::CommandRouter(Dispatcher& dispatcher, const Clock& clock, EventLog& log,
                             EnvelopeSink reports)
    : dispatcher_(dispatcher), clock_(clock), log_(log), reports_(std::move(reports)) {}

CommandRouter::~CommandRouter() { stop_all(); }

UiEnvelope CommandRouter::report(const UiCommandMessage& msg, OrderedJson body) const {
  OrderedJson payload;
  payload["request"] = {{"id", msg.id}, {"type", msg.type}};
  for (auto& [k, v] : body.items()) payload[k] = v;
  return UiEnvelope{EnvelopeKind::DispatchReport, std::move(payload), clock_.wall_now()};
}

std::string CommandRouter::handle_ui_command(std::string_view raw) {
  UiCommandMessage msg;
  try {
    msg = parse_ui_command(raw);
  } catch (const ParseError& e) {
    log_.log_info("gs", std::string(e.what()) + " | frame: " + std::string(raw), "receive-error");
    return error_frame(e.what(), clock_.wall_now());
  }

  CommandRequest req{selector_from_wire(msg.id), msg.type, msg.params};
  auto key = std::make_pair(msg.id, msg.type);
  try {
    if (!msg.repeat) {
      auto env = report(msg, to_json(dispatcher_.dispatch(req)));
      if (reports_) reports_(env);
      return to_wire(env);
    }

    if (!msg.repeat->start) {
      std::optional<RepeatHandle> handle;
      {
        std::lock_guard lock(mutex_);
        if (auto it = repeats_.find(key); it != repeats_.end()) {
          handle = it->second;
          repeats_.erase(it);
        }
      }
      if (handle) dispatcher_.stop_repeating(*handle);
      return to_wire(report(msg, {{"repeat", "stopped"}, {"was_running", handle.has_value()}}));
    }

    std::lock_guard lock(mutex_);
    if (auto it = repeats_.find(key); it != repeats_.end()) {
      return to_wire(report(msg, {{"repeat", "already-running"}, {"handle", it->second.value}}));
    }
    auto handle = dispatcher_.start_repeating(
        req, msg.repeat->interval, [this, msg](const DispatchOutcome& outcome) {
          if (reports_) reports_(report(msg, to_json(outcome)));
        });
    repeats_.emplace(key, handle);
    return to_wire(report(msg, {{"repeat", "started"},
                                {"handle", handle.value},
                                {"interval_ms", msg.repeat->interval.count()}}));
  } catch (const UnknownCommand& e) {
    return to_wire(report(msg, {{"error", "unknown-command"}, {"detail", e.what()},
                                {"targets", OrderedJson::array()}}));
  }
}

void CommandRouter::stop_all() {
  std::map<std::pair<std::int64_t, int>, RepeatHandle> running;
  {
    std::lock_guard lock(mutex_);
    running.swap(repeats_);
  }
  for (auto& [key, handle] : running) dispatcher_.stop_repeating(handle);
}

std::size_t CommandRouter::active_repeats() const {
  std::lock_guard lock(mutex_);
  return repeats_.size();
}

}  // namespace gs
