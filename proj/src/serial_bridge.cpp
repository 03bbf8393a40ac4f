// Copyright 2026 The GrADyS Ground Station Authors
// SPDX-License-Identifier: Apache-2.0

#include "groundstation/serial_bridge.hpp"

#include <fcntl.h>
#include <poll.h>
#include <termios.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>

namespace gs {

LineFramer::LineFramer(std::size_t max_line) : max_line_(max_line == 0 ? 1 : max_line) {}

std::vector<std::string> LineFramer::feed(std::string_view chunk) {
  std::vector<std::string> lines;
  for (char c : chunk) {
    if (c == '\n') {
      if (!pending_.empty() && pending_.back() == '\r') pending_.pop_back();
      lines.push_back(std::move(pending_));
      pending_.clear();
      continue;
    }
    pending_.push_back(c);
    if (pending_.size() >= max_line_) {
      lines.push_back(std::move(pending_));
      pending_.clear();
    }
  }
  return lines;
}

std::string_view to_wire(SerialState state) {
  switch (state) {
    case SerialState::Disabled:
      return "disabled";
    case SerialState::Disconnected:
      return "disconnected";
    case SerialState::Connected:
      return "connected";
  }
  return "disconnected";
}

std::optional<unsigned> baud_constant(int baudrate) {
  switch (baudrate) {
    case 1200: return B1200;
    case 2400: return B2400;
    case 4800: return B4800;
    case 9600: return B9600;
    case 19200: return B19200;
    case 38400: return B38400;
    case 57600: return B57600;
    case 115200: return B115200;
    case 230400: return B230400;
    case 460800: return B460800;
    case 500000: return B500000;
    case 921600: return B921600;
    case 1000000: return B1000000;
    case 2000000: return B2000000;
    default: return std::nullopt;
  }
}

SerialBridge::SerialBridge(std::string port, int baudrate, EventLog* log, Callbacks callbacks,
                           std::chrono::milliseconds retry_period)
    : port_(std::move(port)),
      baudrate_(baudrate),
      log_(log),
      callbacks_(std::move(callbacks)),
      retry_period_(retry_period) {
  if (::pipe2(wake_pipe_, O_CLOEXEC | O_NONBLOCK) != 0) {
    throw IoError(std::string("cannot create wake pipe: ") + std::strerror(errno));
  }
}

SerialBridge::~SerialBridge() {
  stop();
  for (int fd : wake_pipe_) {
    if (fd >= 0) ::close(fd);
  }
}

void SerialBridge::start() {
  if (thread_.joinable()) return;
  thread_ = std::jthread([this](std::stop_token st) { run(st); });
}

void SerialBridge::stop() {
  if (!thread_.joinable()) return;
  thread_.request_stop();
  char b = 's';
  [[maybe_unused]] auto n = ::write(wake_pipe_[1], &b, 1);
  thread_.join();
}

void SerialBridge::log(std::string_view origin, std::string_view payload) {
  if (log_) log_->log_info("serial", payload, origin);
}

void SerialBridge::set_state(SerialState s) {
  state_.store(s);
  if (callbacks_.on_state) callbacks_.on_state(s);
}

void SerialBridge::write_command(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  if (state_.load() != SerialState::Connected) {
    log("serial-error", "write while disconnected: " + std::string(line));
    throw NotConnected();
  }
  {
    std::lock_guard lock(write_mutex_);
    writes_.push_back(std::string(line) + "\n");
  }
  log("send-serial", line);
  char b = 'w';
  [[maybe_unused]] auto n = ::write(wake_pipe_[1], &b, 1);
}

int SerialBridge::open_port() {
  auto speed = baud_constant(baudrate_);
  if (!speed) {
    errno = EINVAL;
    return -1;
  }
  int fd = ::open(port_.c_str(), O_RDWR | O_NOCTTY | O_NONBLOCK | O_CLOEXEC);
  if (fd < 0) return -1;

  termios tio{};
  if (::tcgetattr(fd, &tio) != 0) {
    int err = errno;
    ::close(fd);
    errno = err;
    return -1;
  }
  ::cfmakeraw(&tio);
  tio.c_cflag &= ~(PARENB | CSTOPB | CSIZE);
  tio.c_cflag |= CS8 | CLOCAL | CREAD;
  tio.c_cc[VMIN] = 0;
  tio.c_cc[VTIME] = 0;
  ::cfsetispeed(&tio, *speed);
  ::cfsetospeed(&tio, *speed);
  if (::tcsetattr(fd, TCSANOW, &tio) != 0) {
    int err = errno;
    ::close(fd);
    errno = err;
    return -1;
  }
  return fd;
}

bool SerialBridge::flush_writes(int fd) {
  for (;;) {
    std::string frame;
    {
      std::lock_guard lock(write_mutex_);
      if (writes_.empty()) return true;
      frame = std::move(writes_.front());
      writes_.pop_front();
    }
    std::string_view rest = frame;
    while (!rest.empty()) {
      auto n = ::write(fd, rest.data(), rest.size());
      if (n > 0) {
        rest.remove_prefix(static_cast<std::size_t>(n));
      } else if (n < 0 && (errno == EAGAIN || errno == EINTR)) {
        pollfd p{fd, POLLOUT, 0};
        if (::poll(&p, 1, 200) < 0 && errno != EINTR) return false;
        if (p.revents & (POLLHUP | POLLERR | POLLNVAL)) return false;
      } else {
        return false;
      }
    }
  }
}

// Returns when the port fails or a stop is requested.
bool SerialBridge::serve(int fd, std::stop_token& stop) {
  LineFramer framer;
  char buf[4096];
  while (!stop.stop_requested()) {
    pollfd fds[2] = {{fd, POLLIN, 0}, {wake_pipe_[0], POLLIN, 0}};
    int rc = ::poll(fds, 2, 200);
    if (rc < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    if (fds[1].revents & POLLIN) {
      while (::read(wake_pipe_[0], buf, sizeof buf) > 0) {
      }
      if (!flush_writes(fd)) return false;
    }
    if (fds[0].revents & POLLIN) {
      auto n = ::read(fd, buf, sizeof buf);
      if (n > 0) {
        for (auto& line : framer.feed(std::string_view(buf, static_cast<std::size_t>(n)))) {
          log("receive-serial", line);
          if (callbacks_.on_line) {
            try {
              callbacks_.on_line(line);
            } catch (...) {
              if (log_) log_->log_exception("handling serial line", std::current_exception(), "serial");
            }
          }
        }
        continue;
      }
      if (n < 0 && (errno == EAGAIN || errno == EINTR)) continue;
      return false;
    }
    if (fds[0].revents & (POLLHUP | POLLERR | POLLNVAL)) return false;
  }
  return true;
}

void SerialBridge::run(std::stop_token stop) {
  std::mutex m;
  std::condition_variable_any cv;
  auto wait_retry = [&] {
    std::unique_lock lock(m);
    cv.wait_for(lock, stop, retry_period_, [] { return false; });
  };

  bool reported_failure = false;
  set_state(SerialState::Disconnected);
  while (!stop.stop_requested()) {
    int fd = open_port();
    if (fd < 0) {
      if (!reported_failure) {
        log("serial-error", "cannot open " + port_ + ": " + std::strerror(errno));
        reported_failure = true;
      }
      wait_retry();
      continue;
    }
    reported_failure = false;
    {
      std::lock_guard lock(write_mutex_);
      writes_.clear();
    }
    ++connections_;
    log("serial-connected", port_);
    set_state(SerialState::Connected);

    bool stopped = serve(fd, stop);
    ::close(fd);
    set_state(SerialState::Disconnected);
    if (stopped) break;
    log("serial-disconnected", port_);
    wait_retry();
  }
}

}  // namespace gs
