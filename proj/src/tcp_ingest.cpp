#include "snapgate/tcp_ingest.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>

#include "snapgate/error.hpp"
#include "snapgate/log.hpp"
#include "snapgate/session_io.hpp"

namespace snapgate {
namespace {

using Clock = std::chrono::steady_clock;
constexpr int kPollMs = 100;

std::string errno_text() { return std::strerror(errno); }

}  // namespace

TcpFrameSource::TcpFrameSource(TcpIngestOptions options)
    : options_(std::move(options)),
      capacity_(std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(options_.queue_seconds * options_.sample_rate)))) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error("socket: " + errno_text());
  const int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(options_.port);
  if (::inet_pton(AF_INET, options_.host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw Error("not an IPv4 address: " + options_.host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 1) != 0) {
    const auto msg = errno_text();
    ::close(listen_fd_);
    throw Error("cannot listen on " + options_.host + ":" + std::to_string(options_.port) + ": " + msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  thread_ = std::thread([this] { reader(); });
}

TcpFrameSource::~TcpFrameSource() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  space_.notify_all();
  if (thread_.joinable()) thread_.join();
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

std::optional<EmgFrame> TcpFrameSource::next() {
  std::unique_lock lock(mutex_);
  ready_.wait(lock, [this] { return !queue_.empty() || finished_; });
  if (queue_.empty()) return std::nullopt;
  EmgFrame f = std::move(queue_.front());
  queue_.pop_front();
  space_.notify_one();
  return f;
}

IngestStats TcpFrameSource::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

void TcpFrameSource::handle_line(const std::string& raw) {
  std::string_view line(raw);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.empty() || line.front() == '#' || line.front() == 't') return;
  EmgFrame frame;
  std::unique_lock lock(mutex_);
  if (!parse_frame_line(line, options_.channels, frame)) {
    ++stats_.malformed;
    lock.unlock();
    log_warn("dropped malformed line: " + std::string(line.substr(0, 60)));
    return;
  }
  ++stats_.received;
  if (options_.overflow == OverflowPolicy::Block) {
    space_.wait(lock, [this] { return queue_.size() < capacity_ || stopping_; });
    if (stopping_) return;
  } else if (queue_.size() >= capacity_) {
    queue_.pop_front();
    ++stats_.dropped;
  }
  queue_.push_back(std::move(frame));
  ready_.notify_one();
}

void TcpFrameSource::reader() {
  auto finish = [this] {
    std::lock_guard lock(mutex_);
    finished_ = true;
    ready_.notify_all();
  };
  auto stopping = [this] {
    std::lock_guard lock(mutex_);
    return stopping_;
  };

  int fd = -1;
  while (fd < 0) {
    if (stopping()) return finish();
    pollfd p{listen_fd_, POLLIN, 0};
    if (::poll(&p, 1, kPollMs) > 0) fd = ::accept(listen_fd_, nullptr, nullptr);
  }
  log_info("producer connected");

  const double min_rate = 0.5 * options_.sample_rate;
  const auto connected = Clock::now();
  std::deque<Clock::time_point> arrivals;  // within the last second
  bool stalled = false;
  std::string pending;
  char chunk[4096];

  while (!stopping()) {
    pollfd p{fd, POLLIN, 0};
    const int ready = ::poll(&p, 1, kPollMs);
    if (ready > 0) {
      const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
      if (n <= 0) break;
      pending.append(chunk, static_cast<std::size_t>(n));
      std::size_t start = 0;
      for (std::size_t nl; (nl = pending.find('\n', start)) != std::string::npos; start = nl + 1) {
        handle_line(pending.substr(start, nl - start));
        arrivals.push_back(Clock::now());
      }
      pending.erase(0, start);
    }
    const auto now = Clock::now();
    while (!arrivals.empty() && now - arrivals.front() > std::chrono::seconds(1)) arrivals.pop_front();
    if (now - connected > std::chrono::seconds(1)) {
      const bool slow = static_cast<double>(arrivals.size()) < min_rate;
      if (slow && !stalled) {
        {
          std::lock_guard lock(mutex_);
          ++stats_.stalls;
        }
        log_warn("input stalled: " + std::to_string(arrivals.size()) + " frames in the last second");
      }
      stalled = slow;
    }
  }
  if (!pending.empty()) handle_line(pending);
  ::close(fd);
  log_info("producer disconnected");
  finish();
}

}  // namespace snapgate
