#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "snapgate/error.hpp"
#include "snapgate/lda.hpp"
#include "snapgate/synth.hpp"

using namespace snapgate;
using namespace snapgate::synth;

namespace {

std::string text(const SynthOutput& out) {
  std::ostringstream s;
  write_session(s, out.session);
  write_annotations(s, out.annotations);
  return s.str();
}

double rms_between(const SessionFile& s, double t0, double t1) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& f : s.frames) {
    if (f.timestamp < t0 || f.timestamp >= t1) continue;
    for (double v : f.samples) sum += v * v;
    n += f.samples.size();
  }
  return std::sqrt(sum / static_cast<double>(n));
}

}  // namespace

TEST(Synth, EmptySpecIsBaselineNoise) {
  SynthSpec spec;
  const auto out = synthesize(spec);
  EXPECT_EQ(out.session.frames.size(), 2000u);
  EXPECT_TRUE(out.annotations.intervals.empty());
  const double r = rms_between(out.session, 0, 10);
  EXPECT_GT(r, 1.0);
  EXPECT_LT(r, 3.5);
  for (const auto& f : out.session.frames) {
    for (double v : f.samples) {
      EXPECT_EQ(v, std::round(v));
      EXPECT_GE(v, -128);
      EXPECT_LE(v, 127);
    }
  }
}

TEST(Synth, SameSeedGivesIdenticalBytes) {
  const auto spec = session_spec(5, 7, 120.0, 8, all_profiles());
  EXPECT_EQ(text(synthesize(spec)), text(synthesize(spec)));
  EXPECT_EQ(text(synthesize(training_spec(3, 7))), text(synthesize(training_spec(3, 7))));
}

TEST(Synth, SeedChangesNoiseButNotTheSchedule) {
  const auto a = synthesize(session_spec(5, 7, 120.0, 8, all_profiles()));
  const auto b = synthesize(session_spec(6, 7, 120.0, 8, all_profiles()));
  EXPECT_EQ(a.annotations.intervals, b.annotations.intervals);
  EXPECT_NE(text(a), text(b));
}

TEST(Synth, FortyScheduledSnapsAreAnnotated) {
  const auto spec = session_spec(1, 7, 600.0, 40, all_profiles());
  EXPECT_EQ(spec.snaps.size(), 40u);
  const auto out = synthesize(spec);
  const auto snaps = out.annotations.snap_times();
  ASSERT_EQ(snaps.size(), 40u);
  for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(snaps[i], spec.snaps[i]);
}

TEST(Synth, SnapEnergyStartsAtTheAnnotatedInstant) {
  SynthSpec spec;
  spec.baseline_rms = 0.0;
  spec.snap_press = 0.0;
  spec.snaps = {2.5, 6.005};
  const auto out = synthesize(spec);
  for (double t : spec.snaps) {
    const auto first = static_cast<std::size_t>(std::llround(t * spec.sample_rate));
    for (std::size_t i = first - 20; i <= first; ++i) {
      for (double v : out.session.frames[i].samples) EXPECT_EQ(v, 0.0) << "sample " << i;
    }
    EXPECT_GT(rms_between(out.session, t, t + 0.15), 10.0);
  }
}

TEST(Synth, ContractionsStandWellAboveBaseline) {
  const auto spec = training_spec(9, 7);
  const auto out = synthesize(spec);
  const double baseline = rms_between(out.session, 0.0, 1.9);
  for (const auto& c : spec.contractions) {
    if (c.label == default_class_labels().back()) continue;  // rest
    EXPECT_GE(rms_between(out.session, c.start + 1.0, c.start + 2.0), 5.0 * baseline) << c.label << " " << c.start;
  }
}

TEST(Synth, TrainingPresetLayout) {
  const auto spec = training_spec(1, 7);
  EXPECT_EQ(spec.contractions.size(), 25u);
  EXPECT_EQ(spec.snaps.size(), 20u);
  EXPECT_TRUE(spec.adl.empty());
  EXPECT_NO_THROW(spec.validate());
}

TEST(Synth, OverlapAndBoundsAreSpecErrors) {
  SynthSpec spec;
  spec.contractions.push_back({2.0, 3.0, default_class_labels()[0], 0.7, 1.0});
  spec.snaps = {3.0};
  EXPECT_THROW(synthesize(spec), SpecError);
  spec.snaps = {12.0};
  EXPECT_THROW(synthesize(spec), SpecError);
  spec.snaps = {};
  spec.contractions[0].label = "Jazzhands";
  EXPECT_THROW(synthesize(spec), SpecError);
  EXPECT_THROW(session_spec(1, 7, 600.0, 39, all_profiles()), SpecError);
  EXPECT_THROW(session_spec(1, 7, 60.0, 40, all_profiles()), SpecError);
}

TEST(Synth, ProfileNames) {
  for (auto p : all_profiles()) EXPECT_EQ(profile_from_string(to_string(p)), p);
  EXPECT_EQ(std::string(to_string(AdlProfile::TypingBursty)), "typing-bursty");
  EXPECT_FALSE(profile_from_string("skiing"));
}

TEST(Synth, AdlSpecCoversTheDuration) {
  const auto spec = adl_spec(1, 7, 60.0, all_profiles());
  ASSERT_EQ(spec.adl.size(), 3u);
  EXPECT_EQ(spec.adl.front().start, 0.0);
  EXPECT_EQ(spec.adl.back().end, 60.0);
  EXPECT_TRUE(spec.snaps.empty());
  const auto out = synthesize(spec);
  EXPECT_GT(rms_between(out.session, 0, 60), rms_between(synthesize(SynthSpec{}).session, 0, 10));
}
