#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "snapgate/signal.hpp"

namespace snapgate {

enum class OverflowPolicy {
  DropOldest,  // live use: stale frames are worthless, count and discard them
  Block,       // replay: stop reading the socket until the consumer catches up
};

struct TcpIngestOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks an ephemeral port
  std::size_t channels = kDefaultChannels;
  double sample_rate = kDefaultSampleRate;
  double queue_seconds = 2.0;
  OverflowPolicy overflow = OverflowPolicy::DropOldest;
};

struct IngestStats {
  std::size_t received = 0;
  std::size_t malformed = 0;
  std::size_t dropped = 0;
  std::size_t stalls = 0;
};

/// Listens for a single producer sending newline-delimited "t,c1,...,cC"
/// frames. A reader thread parses lines into a bounded queue; next() hands
/// frames to the consumer in arrival order. Lines starting with '#' or 't'
/// (a session file header) are skipped silently; anything else that does not
/// parse is dropped and counted.
class TcpFrameSource {
 public:
  /// Binds and listens immediately; throws Error when that fails.
  explicit TcpFrameSource(TcpIngestOptions options);
  ~TcpFrameSource();
  TcpFrameSource(const TcpFrameSource&) = delete;
  TcpFrameSource& operator=(const TcpFrameSource&) = delete;

  std::uint16_t port() const { return port_; }

  /// Blocks until a frame is available. Empty once the producer disconnected
  /// and the queue is drained.
  std::optional<EmgFrame> next();

  IngestStats stats() const;

 private:
  void reader();
  void handle_line(const std::string& line);

  TcpIngestOptions options_;
  std::size_t capacity_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;

  mutable std::mutex mutex_;
  std::condition_variable ready_;
  std::condition_variable space_;
  std::deque<EmgFrame> queue_;
  bool finished_ = false;
  bool stopping_ = false;
  IngestStats stats_;
  std::thread thread_;
};

}  // namespace snapgate
