#include "snapgate/signal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "snapgate/error.hpp"
#include "snapgate/log.hpp"

namespace snapgate {

void WindowSpec::validate() const {
  if (length_samples < 1 || increment_samples < 1) {
    throw std::invalid_argument("window length and increment must be >= 1 sample");
  }
  if (increment_samples > length_samples) {
    throw std::invalid_argument("window increment must not exceed window length");
  }
}

std::size_t ms_to_samples(double ms, double sample_rate) {
  const double n = std::round(ms * sample_rate / 1000.0);
  if (!(n >= 0.0)) throw std::invalid_argument("duration must be non-negative");
  return static_cast<std::size_t>(n);
}

WindowSpec WindowSpec::from_ms(double length_ms, double increment_ms, double sample_rate) {
  WindowSpec spec{ms_to_samples(length_ms, sample_rate), ms_to_samples(increment_ms, sample_rate)};
  spec.validate();
  return spec;
}

WindowView::WindowView(std::span<const double> data, std::size_t length, std::size_t channels)
    : data_(data), length_(length), channels_(channels) {
  if (data.size() != length * channels) {
    throw DimensionError("window data size does not match length x channels");
  }
}

Window window_from_channels(const std::vector<std::vector<double>>& channels) {
  Window w;
  w.channels = channels.size();
  w.length = channels.empty() ? 0 : channels.front().size();
  w.data.resize(w.length * w.channels);
  for (std::size_t c = 0; c < w.channels; ++c) {
    if (channels[c].size() != w.length) throw DimensionError("ragged channel data");
    for (std::size_t i = 0; i < w.length; ++i) w.data[i * w.channels + c] = channels[c][i];
  }
  return w;
}

std::size_t window_count(std::size_t total, const WindowSpec& spec) {
  spec.validate();
  if (total < spec.length_samples) return 0;
  return (total - spec.length_samples) / spec.increment_samples + 1;
}

std::vector<Window> windowize(std::span<const EmgFrame> frames, const WindowSpec& spec) {
  const std::size_t count = window_count(frames.size(), spec);
  std::vector<Window> out;
  out.reserve(count);
  if (count == 0) return out;
  const std::size_t channels = frames.front().samples.size();
  for (std::size_t k = 0; k < count; ++k) {
    Window w;
    w.length = spec.length_samples;
    w.channels = channels;
    w.data.reserve(w.length * channels);
    const std::size_t start = k * spec.increment_samples;
    for (std::size_t i = start; i < start + spec.length_samples; ++i) {
      const auto& s = frames[i].samples;
      if (s.size() != channels) throw DimensionError("inconsistent channel count in frame sequence");
      w.data.insert(w.data.end(), s.begin(), s.end());
    }
    w.end_time = frames[start + spec.length_samples - 1].timestamp;
    out.push_back(std::move(w));
  }
  return out;
}

SignalBuffer::SignalBuffer(std::size_t capacity, std::size_t channels,
                           std::optional<double> sample_period)
    : capacity_(capacity), channels_(channels), sample_period_(sample_period) {
  if (capacity == 0) throw std::invalid_argument("buffer capacity must be positive");
  if (channels == 0) throw std::invalid_argument("channel count must be positive");
}

PushOutcome SignalBuffer::push(EmgFrame frame) {
  if (frame.samples.size() != channels_) {
    throw DimensionError("frame has " + std::to_string(frame.samples.size()) +
                         " channels, expected " + std::to_string(channels_));
  }
  if (!std::isfinite(frame.timestamp) || frame.timestamp < 0.0) {
    throw StreamOrderError("frame timestamp must be finite and non-negative");
  }
  if (last_timestamp_ && !(frame.timestamp > *last_timestamp_)) {
    throw StreamOrderError("non-monotone timestamp " + std::to_string(frame.timestamp) +
                           " after " + std::to_string(*last_timestamp_));
  }
  PushOutcome outcome = PushOutcome::Appended;
  if (sample_period_ && last_timestamp_ &&
      frame.timestamp - *last_timestamp_ > 2.0 * *sample_period_ * (1.0 + 1e-9)) {
    log_warn("stream gap of " + std::to_string(frame.timestamp - *last_timestamp_) +
             " s; buffer reset");
    frames_.clear();
    outcome = PushOutcome::ResetOnGap;
  }
  last_timestamp_ = frame.timestamp;
  frames_.push_back(std::move(frame));
  if (frames_.size() > capacity_) frames_.pop_front();
  return outcome;
}

Window SignalBuffer::latest(std::size_t n) const {
  if (n > frames_.size()) throw std::out_of_range("not enough buffered frames");
  Window w;
  w.length = n;
  w.channels = channels_;
  w.data.reserve(n * channels_);
  for (auto it = frames_.end() - static_cast<std::ptrdiff_t>(n); it != frames_.end(); ++it) {
    w.data.insert(w.data.end(), it->samples.begin(), it->samples.end());
  }
  w.end_time = n == 0 ? 0.0 : frames_.back().timestamp;
  return w;
}

void SignalBuffer::clear() {
  frames_.clear();
  last_timestamp_.reset();
}

}  // namespace snapgate
