#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace snapgate {

inline constexpr double kDefaultSampleRate = 200.0;
inline constexpr std::size_t kDefaultChannels = 8;

/// One timestamped sample vector across all channels, in raw device units.
struct EmgFrame {
  double timestamp = 0.0;
  std::vector<double> samples;
};

struct WindowSpec {
  std::size_t length_samples = 1;
  std::size_t increment_samples = 1;

  /// Throws std::invalid_argument unless 1 <= increment <= length.
  void validate() const;

  /// Converts millisecond durations with round(ms * fs / 1000).
  static WindowSpec from_ms(double length_ms, double increment_ms, double sample_rate);

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

std::size_t ms_to_samples(double ms, double sample_rate);

/// Read-only view of an L x C block of samples stored row-major (sample-major).
class WindowView {
 public:
  WindowView(std::span<const double> data, std::size_t length, std::size_t channels);

  std::size_t length() const { return length_; }
  std::size_t channels() const { return channels_; }
  double operator()(std::size_t i, std::size_t c) const { return data_[i * channels_ + c]; }
  std::span<const double> data() const { return data_; }

 private:
  std::span<const double> data_;
  std::size_t length_;
  std::size_t channels_;
};

/// Owning L x C window, row-major.
struct Window {
  std::vector<double> data;
  std::size_t length = 0;
  std::size_t channels = 0;
  double end_time = 0.0;  // timestamp of the last sample

  WindowView view() const { return {data, length, channels}; }
  operator WindowView() const { return view(); }  // NOLINT(google-explicit-constructor)
};

/// Builds a window from per-channel sample sequences (handy in tests).
Window window_from_channels(const std::vector<std::vector<double>>& channels);

/// Splits `frames` into windows of spec.length_samples starting every
/// spec.increment_samples. No padding: a sequence shorter than one window
/// yields nothing.
std::vector<Window> windowize(std::span<const EmgFrame> frames, const WindowSpec& spec);

/// floor((L - length) / increment) + 1, or 0 when L < length.
std::size_t window_count(std::size_t total, const WindowSpec& spec);

enum class PushOutcome { Appended, ResetOnGap };

/// Bounded FIFO of frames with oldest-first eviction. Frames must arrive with
/// strictly increasing timestamps and the configured channel count. When a
/// sample period is configured, a gap larger than two periods clears the
/// buffer before the new frame is appended.
class SignalBuffer {
 public:
  SignalBuffer(std::size_t capacity, std::size_t channels,
               std::optional<double> sample_period = std::nullopt);

  /// Throws StreamOrderError or DimensionError; the buffer is unchanged then.
  PushOutcome push(EmgFrame frame);

  std::size_t size() const { return frames_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t channels() const { return channels_; }
  bool empty() const { return frames_.empty(); }
  const EmgFrame& front() const { return frames_.front(); }
  const EmgFrame& back() const { return frames_.back(); }
  std::optional<double> last_timestamp() const { return last_timestamp_; }

  /// Copies the most recent n frames into a window. Requires n <= size().
  Window latest(std::size_t n) const;

  void clear();

 private:
  std::size_t capacity_;
  std::size_t channels_;
  std::optional<double> sample_period_;
  std::deque<EmgFrame> frames_;
  std::optional<double> last_timestamp_;
};

}  // namespace snapgate
