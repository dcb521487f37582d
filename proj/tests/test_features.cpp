#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "snapgate/features.hpp"
#include "test_support.hpp"

using namespace snapgate;
using namespace snapgate::features;
using snapgate::testing::Gen;

namespace {

Window single(std::vector<double> x) { return window_from_channels({std::move(x)}); }

Window random_window(Gen& g, std::size_t length, std::size_t channels, double scale = 50.0) {
  std::vector<std::vector<double>> ch(channels, std::vector<double>(length));
  for (auto& c : ch) {
    for (auto& v : c) v = std::round(g.real(-scale, scale));
  }
  return window_from_channels(ch);
}

Window transform(const Window& w, auto fn) {
  Window out = w;
  for (auto& v : out.data) v = fn(v);
  return out;
}

Window reversed(const Window& w) {
  Window out = w;
  for (std::size_t i = 0; i < w.length; ++i) {
    for (std::size_t c = 0; c < w.channels; ++c) {
      out.data[i * w.channels + c] = w.data[(w.length - 1 - i) * w.channels + c];
    }
  }
  return out;
}

// Reference counts written directly from the definitions, one channel at a time.
std::size_t zc_reference(const std::vector<double>& x, double eps) {
  auto sign = [](double v) { return v >= 0.0 ? 1 : -1; };
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (sign(x[i]) != sign(x[i + 1]) && std::abs(x[i] - x[i + 1]) >= eps) ++n;
  }
  return n;
}

std::size_t ssc_reference(const std::vector<double>& x, double eps) {
  std::size_t n = 0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const bool peak = x[i] > x[i - 1] && x[i] > x[i + 1];
    const bool trough = x[i] < x[i - 1] && x[i] < x[i + 1];
    const double rise = std::max(std::abs(x[i] - x[i - 1]), std::abs(x[i] - x[i + 1]));
    if ((peak || trough) && rise >= eps) ++n;
  }
  return n;
}

std::vector<double> channel(const Window& w, std::size_t c) {
  std::vector<double> out;
  for (std::size_t i = 0; i < w.length; ++i) out.push_back(w.data[i * w.channels + c]);
  return out;
}

}  // namespace

TEST(Mav, Examples) {
  EXPECT_DOUBLE_EQ(mav(single(std::vector<double>(40, 0.5)))[0], 0.5);
  EXPECT_DOUBLE_EQ(mav(single({1, -1, 1, -1}))[0], 1.0);
  EXPECT_DOUBLE_EQ(mav(single({1, -2, 3}))[0], 2.0);
}

TEST(ZeroCrossings, Examples) {
  EXPECT_EQ(zero_crossings(single({1, -1, 1, -1}), 0)[0], 3u);
  EXPECT_EQ(zero_crossings(single(std::vector<double>(10, 0.3)), 0)[0], 0u);
  EXPECT_EQ(zero_crossings(single({0.1, -0.1}), 0.5)[0], 0u);
}

TEST(ZeroCrossings, ZeroCountsAsPositive) {
  EXPECT_EQ(zero_crossings(single({0, 1, 0, 2}), 0)[0], 0u);
  EXPECT_EQ(zero_crossings(single({0, -1, 0}), 0)[0], 2u);
}

TEST(SlopeSignChanges, Examples) {
  EXPECT_EQ(slope_sign_changes(single({0, 1, 0, 1, 0}), 0)[0], 3u);
  EXPECT_EQ(slope_sign_changes(single({0, 1, 2, 3}), 0)[0], 0u);
  EXPECT_EQ(slope_sign_changes(single({0, 1, 0}), 2)[0], 0u);
  EXPECT_THROW(slope_sign_changes(single({0, 1}), 0), std::invalid_argument);
}

TEST(WaveformLength, Examples) {
  EXPECT_DOUBLE_EQ(waveform_length(single(std::vector<double>(10, 4.0)))[0], 0.0);
  EXPECT_DOUBLE_EQ(waveform_length(single({0, 1, 0, 1}))[0], 3.0);
  for (std::size_t len : {2u, 7u, 40u}) {
    std::vector<double> x(len);
    for (std::size_t i = 0; i < len; ++i) x[i] = static_cast<double>(i) / static_cast<double>(len - 1);
    EXPECT_NEAR(waveform_length(single(x))[0], 1.0, 1e-12);
  }
}

TEST(Rms, Examples) {
  EXPECT_DOUBLE_EQ(rms(single(std::vector<double>(5, -2.0)))[0], 2.0);
  EXPECT_DOUBLE_EQ(rms(single({3, 4}))[0], std::sqrt(12.5));
  EXPECT_DOUBLE_EQ(rms(single({0, 0, 0}))[0], 0.0);
}

TEST(Features, NegativeEpsRejected) {
  EXPECT_THROW(zero_crossings(single({1, -1}), -0.1), std::invalid_argument);
}

TEST(HudginsTd, ConstantSingleChannel) {
  EXPECT_EQ(hudgins_td(single(std::vector<double>(40, 0.5)), 0), (std::vector<double>{0.5, 0, 0, 0}));
}

TEST(HudginsTd, ChannelSwapPermutesEveryBlock) {
  Gen g(3);
  const Window w = random_window(g, 40, 2);
  Window swapped = w;
  for (std::size_t i = 0; i < w.length; ++i) std::swap(swapped.data[2 * i], swapped.data[2 * i + 1]);
  const auto a = hudgins_td(w, 0);
  const auto b = hudgins_td(swapped, 0);
  for (std::size_t block = 0; block < 4; ++block) {
    EXPECT_EQ(a[2 * block], b[2 * block + 1]);
    EXPECT_EQ(a[2 * block + 1], b[2 * block]);
  }
}

TEST(HudginsTd, EqualsTheFourFeaturesConcatenated) {
  Gen g(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t c = g.size(1, 8);
    const Window w = random_window(g, g.size(3, 60), c);
    const double eps = g.coin() ? 0.0 : g.real(0, 20);
    const auto td = hudgins_td(w, eps);
    ASSERT_EQ(td.size(), 4 * c);
    const auto m = mav(w);
    const auto z = zero_crossings(w, eps);
    const auto s = slope_sign_changes(w, eps);
    const auto l = waveform_length(w);
    for (std::size_t k = 0; k < c; ++k) {
      EXPECT_EQ(td[k], m[k]);
      EXPECT_EQ(td[c + k], static_cast<double>(z[k]));
      EXPECT_EQ(td[2 * c + k], static_cast<double>(s[k]));
      EXPECT_EQ(td[3 * c + k], l[k]);
    }
  }
}

TEST(FeatureProperties, CountsMatchReferenceDefinitions) {
  Gen g(5);
  for (int trial = 0; trial < 300; ++trial) {
    const Window w = random_window(g, g.size(3, 50), g.size(1, 4), 5.0);
    const double eps = g.integer(0, 4);
    const auto z = zero_crossings(w, eps);
    const auto s = slope_sign_changes(w, eps);
    for (std::size_t c = 0; c < w.channels; ++c) {
      EXPECT_EQ(z[c], zc_reference(channel(w, c), eps));
      EXPECT_EQ(s[c], ssc_reference(channel(w, c), eps));
      EXPECT_LE(z[c], w.length - 1);
      EXPECT_LE(s[c], w.length - 2);
    }
  }
}

TEST(FeatureProperties, ScaleEquivariance) {
  Gen g(6);
  for (int trial = 0; trial < 100; ++trial) {
    const Window w = random_window(g, g.size(3, 60), g.size(1, 8));
    const double k = g.real(0.1, 10.0);
    const Window scaled = transform(w, [k](double v) { return k * v; });
    const auto m0 = mav(w), m1 = mav(scaled);
    const auto r0 = rms(w), r1 = rms(scaled);
    const auto l0 = waveform_length(w), l1 = waveform_length(scaled);
    for (std::size_t c = 0; c < w.channels; ++c) {
      EXPECT_NEAR(m1[c], k * m0[c], 1e-9 * (1 + m1[c]));
      EXPECT_NEAR(r1[c], k * r0[c], 1e-9 * (1 + r1[c]));
      EXPECT_NEAR(l1[c], k * l0[c], 1e-9 * (1 + l1[c]));
    }
    EXPECT_EQ(zero_crossings(w, 0), zero_crossings(scaled, 0));
    EXPECT_EQ(slope_sign_changes(w, 0), slope_sign_changes(scaled, 0));
  }
}

TEST(FeatureProperties, TimeReversalInvariance) {
  Gen g(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Window w = random_window(g, g.size(3, 60), g.size(1, 8));
    const Window r = reversed(w);
    const double eps = g.integer(0, 10);
    const auto m0 = mav(w), m1 = mav(r);
    const auto q0 = rms(w), q1 = rms(r);
    const auto l0 = waveform_length(w), l1 = waveform_length(r);
    for (std::size_t c = 0; c < w.channels; ++c) {
      EXPECT_NEAR(m0[c], m1[c], 1e-9);
      EXPECT_NEAR(q0[c], q1[c], 1e-9);
      EXPECT_NEAR(l0[c], l1[c], 1e-9);
    }
    EXPECT_EQ(zero_crossings(w, eps), zero_crossings(r, eps));
    EXPECT_EQ(slope_sign_changes(w, eps), slope_sign_changes(r, eps));
  }
}

TEST(MeanMav, AveragesChannels) {
  EXPECT_DOUBLE_EQ(mean_mav(window_from_channels({{1, -1}, {3, 3}})), 2.0);
}
