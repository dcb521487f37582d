#include "snapgate/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "snapgate/error.hpp"
#include "snapgate/lda.hpp"

namespace snapgate::synth {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// mt19937_64 output is fixed by the standard; the conversions below are
/// spelled out because std distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  double exponential(double rate) {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return -std::log(u) / rate;
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// Stream identifiers mixed into the seeds.
constexpr std::uint64_t kNoiseStream = 0x6e6f697365ull;
constexpr std::uint64_t kAdlStream = 0x61646cull;
constexpr std::uint64_t kSnapStream = 0x736e6170ull;

enum class Shape { Sine, Trapezoid, Ramp };

/// One additive source of muscle activity.
struct Activity {
  double start = 0.0;
  double end = 0.0;
  Shape shape = Shape::Sine;
  double ramp = 0.1;
  std::vector<double> amplitude;  // per channel, envelope standard deviation

  double envelope(double t) const {
    const double tau = t - start;
    const double len = end - start;
    switch (shape) {
      case Shape::Sine: return std::sin(std::numbers::pi * tau / len);
      case Shape::Trapezoid: return std::clamp(std::min(tau, len - tau) / ramp, 0.0, 1.0);
      case Shape::Ramp: return std::clamp(tau / ramp, 0.0, 1.0);
    }
    return 0.0;
  }
};

double circular_distance(double a, double b, double n) {
  const double d = std::fmod(std::abs(a - b), n);
  return std::min(d, n - d);
}

std::vector<double> bump(std::size_t channels, double center, double width, double floor) {
  std::vector<double> w(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    const double d = circular_distance(static_cast<double>(c), center, static_cast<double>(channels));
    w[c] = floor + std::exp(-d * d / (2.0 * width * width));
  }
  return w;
}

/// The simulated wearer: fixed by subject_seed alone.
struct Subject {
  std::vector<double> baseline;
  std::vector<std::vector<double>> class_patterns;  // per label in default order; rest is empty
  std::vector<double> snap_main;
  std::vector<double> snap_micro;

  Subject(const SynthSpec& spec) {
    Rng rng(spec.subject_seed);
    const std::size_t n = spec.channels;
    baseline.resize(n);
    for (auto& b : baseline) b = spec.baseline_rms * rng.uniform(0.8, 1.25);
    const double offset = std::floor(rng.uniform(0.0, static_cast<double>(n)));
    const auto& labels = default_class_labels();
    const double spacing = static_cast<double>(n) / 4.0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (labels[k] == kRestLabel) {
        class_patterns.emplace_back();
        continue;
      }
      auto w = bump(n, offset + spacing * static_cast<double>(k), 1.1, 0.15);
      const double gain = rng.uniform(0.8, 1.2);
      for (auto& v : w) v *= gain;
      class_patterns.push_back(std::move(w));
    }
    // Two-lobed main transient plus a narrower secondary burst.
    const double snap_center = offset + spacing * 0.5 + rng.uniform(-0.3, 0.3);
    snap_main = bump(n, snap_center, 0.7, 0.05);
    const auto lobe = bump(n, snap_center + static_cast<double>(n) / 2.0, 0.8, 0.0);
    for (std::size_t c = 0; c < n; ++c) snap_main[c] += 0.6 * lobe[c];
    snap_micro = bump(n, snap_center + 2.0, 0.8, 0.05);
  }
};

bool overlaps(double a0, double a1, double b0, double b1) { return a0 < b1 && b0 < a1; }

}  // namespace

const char* to_string(AdlProfile profile) {
  switch (profile) {
    case AdlProfile::WalkingLow: return "walking-low";
    case AdlProfile::TypingBursty: return "typing-bursty";
    case AdlProfile::DrivingSustained: return "driving-sustained";
  }
  return "?";
}

std::optional<AdlProfile> profile_from_string(const std::string& name) {
  for (auto p : all_profiles()) {
    if (name == to_string(p)) return p;
  }
  return std::nullopt;
}

std::vector<AdlProfile> all_profiles() {
  return {AdlProfile::WalkingLow, AdlProfile::TypingBursty, AdlProfile::DrivingSustained};
}

AdlParams default_params(AdlProfile profile) {
  switch (profile) {
    case AdlProfile::WalkingLow: return {1.0, 5.0, 0.3, 0.3, 0.8};
    case AdlProfile::TypingBursty: return {2.5, 28.0, 0.3, 0.25, 0.8};
    case AdlProfile::DrivingSustained: return {0.3, 10.0, 0.3, 1.5, 4.0};
  }
  return {};
}

void SynthSpec::validate() const {
  if (!(duration > 0.0) || !(sample_rate > 0.0)) throw SpecError("duration and sample rate must be positive");
  if (channels == 0) throw SpecError("channel count must be positive");
  if (!(baseline_rms >= 0.0)) throw SpecError("baseline RMS must be >= 0");
  if (!(snap_jitter >= 0.0) || !(snap_lead >= 0.0 && snap_lead <= 1.0)) {
    throw SpecError("snap jitter must be >= 0 and lead within [0, 1] s");
  }
  if (!(snap_press >= 0.0) || !(snap_press_level >= 0.0)) throw SpecError("snap press settings must be >= 0");
  const auto& labels = default_class_labels();
  for (const auto& c : contractions) {
    if (std::find(labels.begin(), labels.end(), c.label) == labels.end()) {
      throw SpecError("unknown contraction class '" + c.label + "'");
    }
    if (c.start < 0.0 || !(c.duration > 0.0) || c.start + c.duration > duration) {
      throw SpecError("contraction at " + std::to_string(c.start) + " s lies outside the session");
    }
    if (!(c.ramp_seconds > 0.0) || !(c.intensity >= 0.0)) throw SpecError("bad contraction ramp/intensity");
  }
  for (double t : snaps) {
    if (t < 0.0 || t >= duration) throw SpecError("snap at " + std::to_string(t) + " s lies outside the session");
    for (const auto& c : contractions) {
      if (overlaps(t - snap_lead, t - snap_lead + 1.0, c.start, c.start + c.duration)) {
        throw SpecError("snap at " + std::to_string(t) + " s overlaps a " + c.label + " contraction");
      }
    }
  }
  for (const auto& a : adl) {
    if (a.start < 0.0 || !(a.end > a.start) || a.end > duration) throw SpecError("bad ADL segment bounds");
  }
}

SynthOutput synthesize(const SynthSpec& spec) {
  spec.validate();
  const Subject subject(spec);
  const std::size_t n = spec.channels;
  std::vector<Activity> activities;

  const auto& labels = default_class_labels();
  for (const auto& c : spec.contractions) {
    const auto k = static_cast<std::size_t>(std::find(labels.begin(), labels.end(), c.label) - labels.begin());
    if (subject.class_patterns[k].empty()) continue;  // rest adds nothing
    Activity a;
    a.start = c.start;
    a.end = c.start + c.duration;
    a.shape = Shape::Ramp;
    a.ramp = c.ramp_seconds;
    for (double w : subject.class_patterns[k]) a.amplitude.push_back(spec.contraction_amplitude * c.intensity * w);
    activities.push_back(std::move(a));
  }

  Rng snap_rng(spec.seed ^ kSnapStream);
  std::vector<std::pair<double, double>> busy;  // hand occupied by a snap
  for (double t : spec.snaps) {
    const double main_len = snap_rng.uniform(0.15, 0.30);
    const double gain = snap_rng.uniform(0.85, 1.15);
    Activity main;
    main.start = t;
    main.end = t + main_len;
    main.shape = Shape::Sine;
    for (double w : subject.snap_main) {
      main.amplitude.push_back(spec.snap_amplitude * gain * w * std::max(0.0, 1.0 + 0.1 * snap_rng.normal()));
    }
    Activity micro;
    micro.start = t + 0.10 + snap_rng.uniform(-spec.snap_jitter, spec.snap_jitter);
    micro.end = micro.start + 0.06;
    micro.shape = Shape::Sine;
    for (double w : subject.snap_micro) micro.amplitude.push_back(0.5 * spec.snap_amplitude * gain * w);
    // Thumb pressed against the middle finger before the release.
    Activity press;
    press.end = t;
    press.start = t - spec.snap_press * snap_rng.uniform(0.8, 1.2);
    press.shape = Shape::Ramp;
    press.ramp = press.end - press.start;
    for (double w : subject.snap_main) press.amplitude.push_back(spec.snap_press_level * spec.snap_amplitude * gain * w);
    busy.emplace_back(std::min(press.start, t) - spec.adl_pause_lead, main.end + 0.1);
    if (press.ramp > 0.0) activities.push_back(std::move(press));
    activities.push_back(std::move(main));
    activities.push_back(std::move(micro));
  }

  std::vector<std::size_t> active_classes;
  for (std::size_t k = 0; k < subject.class_patterns.size(); ++k) {
    if (!subject.class_patterns[k].empty()) active_classes.push_back(k);
  }
  Rng adl_rng(spec.seed ^ kAdlStream);
  for (const auto& seg : spec.adl) {
    const AdlParams p = seg.params.value_or(default_params(seg.profile));
    if (!(p.rate_hz > 0.0)) continue;
    double t = seg.start + adl_rng.exponential(p.rate_hz);
    while (t < seg.end) {
      Activity a;
      a.start = t;
      a.end = std::min(seg.end, t + adl_rng.uniform(p.min_duration, p.max_duration));
      a.shape = Shape::Trapezoid;
      a.ramp = std::min(0.1, 0.25 * (a.end - a.start));
      const double amp = p.amplitude * adl_rng.uniform(1.0 - p.amplitude_jitter, 1.0 + p.amplitude_jitter);
      // Everyday tasks recruit the same muscles as the trained movements:
      // one dominant class pattern, a weaker second one, and a random floor.
      const auto& first = subject.class_patterns[active_classes[static_cast<std::size_t>(
          adl_rng.uniform() * static_cast<double>(active_classes.size()))]];
      const auto& second = subject.class_patterns[active_classes[static_cast<std::size_t>(
          adl_rng.uniform() * static_cast<double>(active_classes.size()))]];
      const double mix = adl_rng.uniform(0.0, 0.25);
      for (std::size_t c = 0; c < n; ++c) {
        a.amplitude.push_back(amp * (first[c] + mix * second[c] + 0.1 * adl_rng.uniform()));
      }
      if (spec.adl_pauses_for_snaps) {
        for (const auto& [b0, b1] : busy) {
          if (a.start >= b0 && a.start < b1) a.end = a.start;
          if (a.start < b0 && a.end > b0) a.end = b0;
        }
        a.ramp = std::min(a.ramp, 0.25 * (a.end - a.start));
      }
      if (a.end > a.start) activities.push_back(std::move(a));
      t += adl_rng.exponential(p.rate_hz);
    }
  }

  std::sort(activities.begin(), activities.end(),
            [](const Activity& a, const Activity& b) { return a.start < b.start; });

  SynthOutput out;
  out.session.channels = n;
  out.session.sample_rate = spec.sample_rate;
  const auto samples = static_cast<std::size_t>(std::llround(spec.duration * spec.sample_rate));
  out.session.frames.reserve(samples);
  Rng noise(spec.seed ^ kNoiseStream);
  std::vector<double> variance(n);
  std::size_t next = 0;
  std::vector<const Activity*> active;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / spec.sample_rate;
    while (next < activities.size() && activities[next].start <= t) active.push_back(&activities[next++]);
    std::erase_if(active, [t](const Activity* a) { return a->end <= t; });
    for (std::size_t c = 0; c < n; ++c) variance[c] = subject.baseline[c] * subject.baseline[c];
    for (const Activity* a : active) {
      const double e = a->envelope(t);
      for (std::size_t c = 0; c < n; ++c) variance[c] += (a->amplitude[c] * e) * (a->amplitude[c] * e);
    }
    EmgFrame frame;
    frame.timestamp = t;
    frame.samples.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
      const double v = std::round(std::sqrt(variance[c]) * noise.normal());
      frame.samples[c] = std::clamp(v, -128.0, 127.0) + 0.0;  // + 0.0 folds -0 into 0
    }
    out.session.frames.push_back(std::move(frame));
  }

  for (const auto& c : spec.contractions) out.annotations.intervals.push_back({c.start, c.start + c.duration, c.label});
  for (double t : spec.snaps) out.annotations.intervals.push_back({t, t, kSnapLabel});
  for (const auto& a : spec.adl) {
    out.annotations.intervals.push_back({a.start, a.end, std::string(kAdlPrefix) + to_string(a.profile)});
  }
  std::stable_sort(out.annotations.intervals.begin(), out.annotations.intervals.end(),
                   [](const Interval& a, const Interval& b) { return a.start < b.start; });
  return out;
}

SynthSpec training_spec(std::uint64_t seed, std::uint64_t subject_seed) {
  SynthSpec spec;
  spec.seed = seed;
  spec.subject_seed = subject_seed;
  double t = 2.0;
  for (int rep = 0; rep < 5; ++rep) {
    for (const auto& label : default_class_labels()) {
      spec.contractions.push_back({t, 3.0, label, 0.7, 1.0});
      t += 5.0;
    }
  }
  t += 1.0;
  for (int i = 0; i < 20; ++i) {
    // Each snap sits inside its own one-second capture period.
    spec.snaps.push_back(t + spec.snap_lead);
    t += 2.0;
  }
  spec.duration = t + 1.0;
  return spec;
}

SynthSpec adl_spec(std::uint64_t seed, std::uint64_t subject_seed, double duration,
                   const std::vector<AdlProfile>& profiles) {
  SynthSpec spec;
  spec.seed = seed;
  spec.subject_seed = subject_seed;
  spec.duration = duration;
  if (profiles.empty()) return spec;
  const double block = duration / static_cast<double>(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    spec.adl.push_back({block * static_cast<double>(i), block * static_cast<double>(i + 1), profiles[i], {}});
  }
  return spec;
}

SynthSpec session_spec(std::uint64_t seed, std::uint64_t subject_seed, double duration,
                       std::size_t snap_count, const std::vector<AdlProfile>& profiles,
                       bool contractions) {
  SynthSpec spec = adl_spec(seed, subject_seed, duration, profiles);
  if (snap_count == 0) return spec;
  if (snap_count % 2 != 0) throw SpecError("session snaps come in on/off pairs; use an even count");
  const std::size_t pairs = snap_count / 2;
  const double period = duration / static_cast<double>(pairs);
  if (period < 12.0) throw SpecError("too many snaps for the session duration");
  const auto& labels = default_class_labels();
  for (std::size_t i = 0; i < pairs; ++i) {
    const double on = period * static_cast<double>(i) + 0.25 * period;
    spec.snaps.push_back(on);
    spec.snaps.push_back(on + 7.0);
    if (contractions) spec.contractions.push_back({on + 2.0, 3.0, labels[i % 4], 0.7, 1.0});
  }
  return spec;
}

}  // namespace snapgate::synth
