#include <gtest/gtest.h>

#include "snapgate/error.hpp"
#include "snapgate/log.hpp"
#include "snapgate/signal.hpp"
#include "test_support.hpp"

using namespace snapgate;
using snapgate::testing::Gen;

namespace {

std::vector<EmgFrame> ramp_frames(std::size_t n, std::size_t channels, double fs = 200.0) {
  std::vector<EmgFrame> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].timestamp = static_cast<double>(i) / fs;
    for (std::size_t c = 0; c < channels; ++c) out[i].samples.push_back(static_cast<double>(i * 10 + c));
  }
  return out;
}

}  // namespace

TEST(WindowSpec, FromMillisecondsAt200Hz) {
  EXPECT_EQ(WindowSpec::from_ms(200, 100, 200), (WindowSpec{40, 20}));
  EXPECT_EQ(WindowSpec::from_ms(150, 50, 200), (WindowSpec{30, 10}));
  EXPECT_EQ(WindowSpec::from_ms(200, 100, 1000), (WindowSpec{200, 100}));
}

TEST(WindowSpec, RejectsIncrementLongerThanWindow) {
  EXPECT_THROW((WindowSpec{10, 11}.validate()), std::invalid_argument);
  EXPECT_THROW((WindowSpec{0, 0}.validate()), std::invalid_argument);
  EXPECT_THROW(WindowSpec::from_ms(100, 200, 200), std::invalid_argument);
}

TEST(Windowize, TenSecondsGives99ClassifierWindows) {
  const auto frames = ramp_frames(2000, 2);
  EXPECT_EQ(windowize(frames, {40, 20}).size(), 99u);
  EXPECT_EQ(window_count(2000, {40, 20}), 99u);
}

TEST(Windowize, ShorterThanOneWindowIsEmpty) {
  EXPECT_TRUE(windowize(ramp_frames(39, 8), {40, 20}).empty());
  EXPECT_EQ(windowize(ramp_frames(40, 8), {40, 20}).size(), 1u);
}

TEST(Windowize, CountMatchesEnumerationOfStartOffsets) {
  Gen g(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t len = g.size(1, 30);
    const std::size_t inc = g.size(1, len);
    const std::size_t total = g.size(0, 120);
    std::size_t brute = 0;
    for (std::size_t start = 0; start + len <= total; start += inc) ++brute;
    EXPECT_EQ(window_count(total, {len, inc}), brute) << total << " " << len << " " << inc;
  }
}

TEST(Windowize, WindowsAreContiguousAndStampedByLastSample) {
  const auto frames = ramp_frames(100, 3);
  const auto ws = windowize(frames, {40, 20});
  ASSERT_EQ(ws.size(), 4u);
  for (std::size_t k = 0; k < ws.size(); ++k) {
    const std::size_t start = k * 20;
    EXPECT_DOUBLE_EQ(ws[k].end_time, frames[start + 39].timestamp);
    for (std::size_t i = 0; i < 40; ++i) {
      for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(ws[k].view()(i, c), frames[start + i].samples[c]);
    }
  }
}

TEST(Windowize, RaggedFrameThrows) {
  auto frames = ramp_frames(50, 4);
  frames[10].samples.pop_back();
  EXPECT_THROW(windowize(frames, {40, 20}), DimensionError);
}

TEST(WindowFromChannels, TransposesIntoSampleMajor) {
  const auto w = window_from_channels({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(w.length, 3u);
  EXPECT_EQ(w.channels, 2u);
  EXPECT_EQ(w.data, (std::vector<double>{1, 4, 2, 5, 3, 6}));
  EXPECT_THROW(window_from_channels({{1, 2}, {3}}), DimensionError);
}

TEST(SignalBuffer, EvictsOldestBeyondCapacity) {
  SignalBuffer buf(3, 1);
  for (int i = 0; i < 5; ++i) buf.push({i * 0.005, {static_cast<double>(i)}});
  EXPECT_EQ(buf.size(), 3u);
  EXPECT_EQ(buf.front().samples[0], 2.0);
  const auto w = buf.latest(2);
  EXPECT_EQ(w.data, (std::vector<double>{3, 4}));
  EXPECT_DOUBLE_EQ(w.end_time, 0.02);
  EXPECT_THROW(buf.latest(4), std::out_of_range);
}

TEST(SignalBuffer, RejectsBadFramesWithoutChangingState) {
  SignalBuffer buf(10, 2);
  buf.push({1.0, {1, 2}});
  EXPECT_THROW(buf.push({1.0, {1, 2}}), StreamOrderError);
  EXPECT_THROW(buf.push({0.5, {1, 2}}), StreamOrderError);
  EXPECT_THROW(buf.push({2.0, {1, 2, 3}}), DimensionError);
  EXPECT_THROW(buf.push({-1.0, {1, 2}}), StreamOrderError);
  EXPECT_EQ(buf.size(), 1u);
  EXPECT_EQ(*buf.last_timestamp(), 1.0);
  buf.push({1.005, {3, 4}});
  EXPECT_EQ(buf.size(), 2u);
}

TEST(SignalBuffer, GapLongerThanTwoPeriodsResets) {
  std::vector<std::string> warnings;
  set_log_sink([&](LogLevel level, std::string_view msg) {
    if (level == LogLevel::Warn) warnings.emplace_back(msg);
  });
  SignalBuffer buf(100, 1, 0.005);
  buf.push({0.000, {0}});
  EXPECT_EQ(buf.push({0.010, {0}}), PushOutcome::Appended);  // exactly two periods
  EXPECT_EQ(buf.size(), 2u);
  EXPECT_EQ(buf.push({0.026, {0}}), PushOutcome::ResetOnGap);
  EXPECT_EQ(buf.size(), 1u);
  set_log_sink({});
  EXPECT_EQ(warnings.size(), 1u);
}
