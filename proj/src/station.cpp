// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include "groundstation/station.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <condition_variable>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace gs {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

BindAddress parse_bind(std::string_view text) {
  BindAddress out;
  auto colon = text.rfind(':');
  std::string_view port_text = text;
  if (colon != std::string_view::npos) {
    out.host = std::string(text.substr(0, colon));
    port_text = text.substr(colon + 1);
    if (out.host.starts_with('[') && out.host.ends_with(']')) {
      out.host = out.host.substr(1, out.host.size() - 2);
    }
    if (out.host.empty()) out.host = "127.0.0.1";
  }
  unsigned port = 0;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (port_text.empty() || ec != std::errc{} || ptr != port_text.data() + port_text.size() ||
      port > 65535) {
    throw ParseError("invalid bind address '" + std::string(text) + "' (expected host:port)");
  }
  out.port = static_cast<std::uint16_t>(port);
  return out;
}

namespace {

enum class WsRole { Stream, Commands };

std::string_view mime_type(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".map") return "application/json";
  return "application/octet-stream";
}

constexpr std::string_view kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>Ground station</title></head>
<body>
<h1>Ground station</h1>
<p>The operator console is not installed. Start the station with
<code>--static-dir</code> pointing at the console build.</p>
<ul>
<li>WebSocket stream: <code>/ws/connection/</code></li>
<li>WebSocket commands: <code>/ws/receive/</code></li>
<li>Command table: <a href="/commands">/commands</a></li>
<li>Devices: <a href="/devices">/devices</a></li>
<li>Health: <a href="/healthz">/healthz</a></li>
</ul>
</body></html>
)";

}  // namespace

struct Station::Impl {
  explicit Impl(StationOptions opts);

  http::response<http::string_body> handle_http(const http::request<http::string_body>& req);
  HttpResponse serve_static(std::string_view path) const;
  std::string health() const;
  std::string commands_json() const;
  void on_serial_line(const std::string& line);
  void post_command(std::string text, std::function<void(std::string)> reply);

  StationOptions options;
  const Clock& clock;
  std::unique_ptr<BlockingHttpTransport> owned_transport;
  HttpTransport& transport;
  EventLog log;
  Registry registry;
  Hub hub;
  Hub sessions;  // every WebSocket session, for shutdown
  Dispatcher dispatcher;
  CommandRouter router;
  IngestionService ingestion;
  std::unique_ptr<SerialBridge> serial;
  std::unique_ptr<UpdateLoop> update_loop;

  asio::io_context ioc;
  std::optional<tcp::acceptor> acceptor;
  std::vector<std::thread> io_threads;
  asio::thread_pool command_pool{4};
  std::uint16_t bound_port = 0;

  std::atomic<bool> running{false};
  std::mutex state_mutex;
  std::condition_variable state_cv;
  bool started = false;
  bool stopped = false;
};

namespace {

class WsSession : public Subscriber, public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, WsRole role, Station::Impl& impl)
      : ws_(std::move(socket)), role_(role), impl_(impl), outbox_(impl.options.outbox_capacity) {}

  ~WsSession() override { detach(); }

  void run(http::request<http::string_body> req) {
    req_ = std::move(req);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.set_option(websocket::stream_base::decorator([](websocket::response_type& res) {
      res.set(http::field::server, "groundstation");
    }));
    ws_.async_accept(req_, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  void deliver(Frame frame) override {
    if (!outbox_.push(std::move(frame))) {
      auto dropped = outbox_.dropped();
      if (dropped == 1 || dropped % 100 == 0) {
        impl_.hub.warn("console outbox full, dropped " + std::to_string(dropped) +
                       " oldest envelope(s)");
      }
    }
    asio::post(ws_.get_executor(),
               beast::bind_front_handler(&WsSession::maybe_write, shared_from_this()));
  }

  void close() override {
    asio::post(ws_.get_executor(), [self = shared_from_this()] {
      self->close_requested_ = true;
      self->maybe_write();
    });
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    session_id_ = impl_.sessions.attach(weak_from_this());
    if (role_ == WsRole::Stream) {
      hub_id_ = impl_.hub.attach(weak_from_this());
      auto state = impl_.options.config.serial_available ? to_wire(impl_.serial->state())
                                                         : to_wire(SerialState::Disabled);
      deliver(std::make_shared<const std::string>(
          to_wire(connection_status("serial", state, impl_.clock.wall_now()))));
    }
    do_read();
  }

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      detach();
      return;
    }
    if (role_ == WsRole::Commands) {
      auto text = beast::buffers_to_string(buffer_.data());
      std::weak_ptr<WsSession> weak = weak_from_this();
      impl_.post_command(std::move(text), [weak](std::string reply) {
        if (auto self = weak.lock()) self->deliver(std::make_shared<const std::string>(std::move(reply)));
      });
    }
    buffer_.consume(buffer_.size());
    do_read();
  }

  void maybe_write() {
    if (closed_ || writing_) return;
    if (auto frame = outbox_.pop()) {
      writing_ = true;
      current_ = std::move(*frame);
      ws_.text(true);
      ws_.async_write(asio::buffer(*current_),
                      beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
      return;
    }
    if (close_requested_) {
      closed_ = true;
      ws_.async_close(websocket::close_code::going_away,
                      [self = shared_from_this()](beast::error_code) { self->detach(); });
    }
  }

  void on_write(beast::error_code ec, std::size_t) {
    writing_ = false;
    current_.reset();
    if (ec) {
      closed_ = true;
      detach();
      return;
    }
    maybe_write();
  }

  void detach() {
    if (hub_id_) impl_.hub.detach(std::exchange(hub_id_, 0));
    if (session_id_) impl_.sessions.detach(std::exchange(session_id_, 0));
  }

  websocket::stream<beast::tcp_stream> ws_;
  http::request<http::string_body> req_;
  beast::flat_buffer buffer_;
  WsRole role_;
  Station::Impl& impl_;
  Outbox outbox_;
  Frame current_;
  bool writing_ = false;
  bool close_requested_ = false;
  bool closed_ = false;
  std::uint64_t hub_id_ = 0;
  std::uint64_t session_id_ = 0;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Station::Impl& impl) : stream_(std::move(socket)), impl_(impl) {}

  void run() {
    asio::dispatch(stream_.get_executor(),
                   beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
  }

 private:
  void do_read() {
    parser_.emplace();
    parser_->body_limit(1 << 20);
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, *parser_,
                     beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      beast::error_code ignored;
      stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
      return;
    }
    if (ec) return;

    auto req = parser_->release();
    if (websocket::is_upgrade(req)) {
      std::string_view target(req.target().data(), req.target().size());
      target = target.substr(0, target.find('?'));
      std::optional<WsRole> role;
      if (target == kStreamRoute) role = WsRole::Stream;
      if (target == kCommandRoute) role = WsRole::Commands;
      if (role) {
        stream_.expires_never();
        std::make_shared<WsSession>(stream_.release_socket(), *role, impl_)->run(std::move(req));
        return;
      }
    }
    send(impl_.handle_http(req));
  }

  void send(http::response<http::string_body>&& res) {
    auto sp = std::make_shared<http::response<http::string_body>>(std::move(res));
    http::async_write(stream_, *sp,
                      [self = shared_from_this(), sp](beast::error_code ec, std::size_t) {
                        if (ec) return;
                        if (sp->need_eof()) {
                          beast::error_code ignored;
                          self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                          return;
                        }
                        self->do_read();
                      });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
  Station::Impl& impl_;
};

void accept_loop(tcp::acceptor& acceptor, Station::Impl& impl) {
  acceptor.async_accept(asio::make_strand(impl.ioc),
                        [&acceptor, &impl](beast::error_code ec, tcp::socket socket) {
                          if (!ec) {
                            beast::error_code ignored;
                            socket.set_option(tcp::no_delay(true), ignored);
                            std::make_shared<HttpSession>(std::move(socket), impl)->run();
                          }
                          if (acceptor.is_open()) accept_loop(acceptor, impl);
                        });
}

}  // namespace

Station::Impl::Impl(StationOptions opts)
    : options(std::move(opts)),
      clock(options.clock ? *options.clock : SystemClock::instance()),
      owned_transport(options.transport ? nullptr : std::make_unique<BlockingHttpTransport>()),
      transport(options.transport ? *options.transport : *owned_transport),
      log(options.log_dir, options.log_module, [this] { return clock.wall_now(); }),
      registry(LivenessThresholds::from_config(options.config, options.time_scale)),
      hub([this](const std::string& msg) { log.log_info("gs", msg, "ws-overflow"); }),
      dispatcher(options.config, registry, log, transport, options.cmd_timeout),
      router(dispatcher, clock, log, [this](const UiEnvelope& env) { hub.broadcast(env); }),
      ingestion(options.config, registry, log, clock,
                [this](const UiEnvelope& env) { hub.broadcast(env); }) {
  if (options.config.serial_available) {
    serial = std::make_unique<SerialBridge>(
        options.config.serial_port, options.config.serial_baudrate, &log,
        SerialBridge::Callbacks{
            [this](SerialState s) {
              hub.broadcast(connection_status("serial", to_wire(s), clock.wall_now()));
            },
            [this](const std::string& line) { on_serial_line(line); }},
        options.serial_retry);
  }
}

void Station::Impl::on_serial_line(const std::string& line) {
  OrderedJson payload;
  payload["line"] = line;
  auto parsed = OrderedJson::parse(line, nullptr, false);
  if (!parsed.is_discarded()) payload["data"] = parsed;
  hub.broadcast(UiEnvelope{EnvelopeKind::SerialLine, std::move(payload), clock.wall_now()});

  if (!parsed.is_discarded() && parsed.is_object()) {
    try {
      ingestion.accept(parse_telemetry(line, "application/json"), "serial");
    } catch (const ParseError&) {
      // Opaque gateway line, not telemetry.
    } catch (const ValidationError& e) {
      log.log_info("serial", std::string(e.what()) + " | line: " + line, "receive-error");
    }
  }
}

void Station::Impl::post_command(std::string text, std::function<void(std::string)> reply) {
  asio::post(command_pool, [this, text = std::move(text), reply = std::move(reply)] {
    std::string out;
    try {
      out = router.handle_ui_command(text);
    } catch (...) {
      log.log_exception("handling console command");
      out = error_frame("internal error", clock.wall_now());
    }
    reply(std::move(out));
  });
}

std::string Station::Impl::health() const {
  OrderedJson j;
  bool up = running.load();
  j["http"] = up ? "up" : "down";
  j["ws"] = up ? "up" : "down";
  j["serial"] = serial ? to_wire(serial->state()) : to_wire(SerialState::Disabled);
  j["registry_size"] = registry.size();
  return j.dump();
}

std::string Station::Impl::commands_json() const {
  OrderedJson list = OrderedJson::array();
  for (const auto& [code, spec] : options.config.commands) {
    list.push_back({{"code", code}, {"endpoint", spec.endpoint}, {"method", to_string(spec.method)}});
  }
  return list.dump();
}

HttpResponse Station::Impl::serve_static(std::string_view path) const {
  if (!options.static_dir) {
    if (path == "/" || path == "/index.html") {
      return HttpResponse{200, std::string(kPlaceholderPage), "text/html; charset=utf-8"};
    }
    return HttpResponse{404, R"({"status":"error","reason":"not found"})"};
  }
  std::filesystem::path rel = std::string(path.substr(1));
  for (const auto& part : rel) {
    if (part == "..") return HttpResponse{404, R"({"status":"error","reason":"not found"})"};
  }
  auto file = *options.static_dir / rel;
  if (path.ends_with('/')) file /= "index.html";
  std::ifstream in(file, std::ios::binary);
  if (!in || std::filesystem::is_directory(file)) {
    return HttpResponse{404, R"({"status":"error","reason":"not found"})"};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return HttpResponse{200, ss.str(), std::string(mime_type(file))};
}

http::response<http::string_body> Station::Impl::handle_http(
    const http::request<http::string_body>& req) {
  std::string_view target(req.target().data(), req.target().size());
  auto path = target.substr(0, target.find('?'));
  std::string_view method(req.method_string().data(), req.method_string().size());

  HttpResponse out;
  if (path == ingestion.route()) {
    std::string_view ctype;
    if (auto it = req.find(http::field::content_type); it != req.end()) {
      ctype = std::string_view(it->value().data(), it->value().size());
    }
    out = ingestion.handle_telemetry_request(method, path, req.body(), ctype);
  } else if (req.method() != http::verb::get && req.method() != http::verb::head) {
    out = HttpResponse{404, R"({"status":"error","reason":"not found"})"};
  } else if (path == "/healthz") {
    out = HttpResponse{200, health()};
  } else if (path == "/commands") {
    out = HttpResponse{200, commands_json()};
  } else if (path == "/devices") {
    auto now = clock.now();
    OrderedJson list = OrderedJson::array();
    for (const auto& rec : registry.snapshot(now)) list.push_back(record_json(rec, now));
    out = HttpResponse{200, list.dump()};
  } else if (options.debug_routes && path.size() > 2 && path.front() == '/' && path.back() == '/' &&
             std::all_of(path.begin() + 1, path.end() - 1,
                         [](char c) { return c >= '0' && c <= '9'; })) {
    auto number = std::string(path.substr(1, path.size() - 2));
    log.log_info("gs", number, "receive-command-test");
    out = HttpResponse{200, R"({"status":"ok","command":")" + number + "\"}"};
  } else {
    out = serve_static(path);
  }

  http::response<http::string_body> res{static_cast<http::status>(out.status), req.version()};
  res.set(http::field::server, "groundstation");
  res.set(http::field::content_type, out.content_type);
  res.keep_alive(req.keep_alive());
  if (req.method() != http::verb::head) res.body() = std::move(out.body);
  res.prepare_payload();
  return res;
}

Station::Station(StationOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Station::~Station() { stop(); }

void Station::start() {
  auto& im = *impl_;
  {
    std::lock_guard lock(im.state_mutex);
    if (im.started) return;
  }

  beast::error_code ec;
  auto address = asio::ip::make_address(im.options.bind.host, ec);
  tcp::endpoint endpoint;
  if (ec) {
    tcp::resolver resolver(im.ioc);
    auto results = resolver.resolve(im.options.bind.host, std::to_string(im.options.bind.port), ec);
    if (ec || results.empty()) {
      throw IoError("cannot resolve bind host '" + im.options.bind.host + "': " + ec.message());
    }
    endpoint = results.begin()->endpoint();
  } else {
    endpoint = tcp::endpoint(address, im.options.bind.port);
  }

  auto where = im.options.bind.host + ":" + std::to_string(im.options.bind.port);
  tcp::acceptor acceptor(asio::make_strand(im.ioc));
  if (acceptor.open(endpoint.protocol(), ec); ec) throw IoError("cannot open socket for " + where + ": " + ec.message());
  acceptor.set_option(asio::socket_base::reuse_address(true), ec);
  if (acceptor.bind(endpoint, ec); ec) throw IoError("cannot bind " + where + ": " + ec.message());
  if (acceptor.listen(asio::socket_base::max_listen_connections, ec); ec) {
    throw IoError("cannot listen on " + where + ": " + ec.message());
  }
  im.bound_port = acceptor.local_endpoint().port();
  im.acceptor.emplace(std::move(acceptor));
  accept_loop(*im.acceptor, im);

  int threads = std::max(1, im.options.io_threads);
  for (int i = 0; i < threads; ++i) im.io_threads.emplace_back([&im] { im.ioc.run(); });
  im.running = true;

  auto period = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::duration<double>(static_cast<double>(im.options.config.update_delay.count()) *
                                    im.options.time_scale));
  im.update_loop = std::make_unique<UpdateLoop>(
      im.registry, im.clock, period,
      [&im](const std::vector<DeviceRecord>& records, SteadyTime now) {
        im.hub.broadcast(registry_snapshot(records, now, im.clock.wall_now()));
      },
      [&im](const std::string& err) { im.log.log_info("gs", err, "update-error"); });

  if (im.serial) im.serial->start();

  OrderedJson info;
  info["bind"] = im.options.bind.host + ":" + std::to_string(im.bound_port);
  info["telemetry"] = im.ingestion.route();
  info["serial"] = im.serial ? im.options.config.serial_port : "disabled";
  info["time_scale"] = im.options.time_scale;
  im.log.log_json("gs", info, "startup");

  std::lock_guard lock(im.state_mutex);
  im.started = true;
}

void Station::stop() {
  auto& im = *impl_;
  {
    std::lock_guard lock(im.state_mutex);
    if (!im.started || im.stopped) {
      im.stopped = true;
      im.state_cv.notify_all();
      return;
    }
  }

  if (im.update_loop) im.update_loop->stop();
  im.router.stop_all();
  im.dispatcher.stop_all();
  if (im.serial) im.serial->stop();

  asio::post(im.acceptor->get_executor(), [&im] {
    beast::error_code ignored;
    im.acceptor->close(ignored);
  });
  im.sessions.close_all();
  auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(1);
  while (im.sessions.client_count() > 0 && std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  im.running = false;
  im.command_pool.join();
  im.ioc.stop();
  for (auto& t : im.io_threads) t.join();
  im.io_threads.clear();

  im.log.log_info("gs", "station stopped", "shutdown");
  std::lock_guard lock(im.state_mutex);
  im.stopped = true;
  im.state_cv.notify_all();
}

void Station::wait() {
  std::unique_lock lock(impl_->state_mutex);
  impl_->state_cv.wait(lock, [this] { return impl_->stopped; });
}

std::uint16_t Station::port() const { return impl_->bound_port; }

std::string Station::base_url() const {
  return "http://" + impl_->options.bind.host + ":" + std::to_string(impl_->bound_port) + "/";
}

std::string Station::health_json() const { return impl_->health(); }
const StationOptions& Station::options() const { return impl_->options; }
Registry& Station::registry() { return impl_->registry; }
Hub& Station::hub() { return impl_->hub; }
EventLog& Station::log() { return impl_->log; }
Dispatcher& Station::dispatcher() { return impl_->dispatcher; }
IngestionService& Station::ingestion() { return impl_->ingestion; }

SerialState Station::serial_state() const {
  return impl_->serial ? impl_->serial->state() : SerialState::Disabled;
}

std::size_t Station::ws_session_count() const { return impl_->sessions.client_count(); }

}  // namespace gs
