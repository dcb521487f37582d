#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "snapgate/session_io.hpp"

namespace snapgate::synth {

// Seeded generator for EMG-like sessions: amplitude-modulated Gaussian noise
// quantized to the byte range, with scheduled ramp contractions, snap
// transients and ADL activity bursts.
//
// Two seeds are involved. `subject_seed` fixes the simulated wearer (channel
// gains, class activation patterns, snap shape) so a training recording and a
// later test recording share them; `seed` drives the noise, burst arrivals and
// per-snap variation.

enum class AdlProfile { WalkingLow, TypingBursty, DrivingSustained };

const char* to_string(AdlProfile profile);
std::optional<AdlProfile> profile_from_string(const std::string& name);

/// Poisson burst statistics for one activity profile.
struct AdlParams {
  double rate_hz = 1.0;
  double amplitude = 10.0;
  double amplitude_jitter = 0.3;  // relative, uniform
  double min_duration = 0.3;
  double max_duration = 0.8;
};

AdlParams default_params(AdlProfile profile);

struct AdlSegment {
  double start = 0.0;
  double end = 0.0;
  AdlProfile profile = AdlProfile::WalkingLow;
  std::optional<AdlParams> params;  // overrides the profile defaults
};

struct Contraction {
  double start = 0.0;
  double duration = 3.0;
  std::string label;        // one of default_class_labels()
  double intensity = 0.7;   // fraction of the subject's full contraction
  double ramp_seconds = 1.0;
};

struct SynthSpec {
  std::uint64_t seed = 1;
  std::uint64_t subject_seed = 7;
  double duration = 10.0;
  double sample_rate = 200.0;
  std::size_t channels = 8;
  double baseline_rms = 2.0;
  double contraction_amplitude = 40.0;
  double snap_amplitude = 70.0;
  /// Onset jitter of the secondary micro-burst, +-seconds.
  double snap_jitter = 0.05;
  /// Seconds of rising pre-release tension before each snap (+-20%), and
  /// its peak as a fraction of the snap amplitude. Zero disables it.
  double snap_press = 0.4;
  double snap_press_level = 0.35;
  /// A snap occupies [t - snap_lead, t - snap_lead + 1 s); contractions may
  /// not overlap that span.
  double snap_lead = 0.7;
  /// The snapping hand stops its task for the gesture: ADL bursts are cut
  /// from `adl_pause_lead` s before the press until 0.1 s after the release.
  bool adl_pauses_for_snaps = true;
  double adl_pause_lead = 0.3;
  std::vector<double> snaps;
  std::vector<Contraction> contractions;
  std::vector<AdlSegment> adl;

  /// Throws SpecError.
  void validate() const;
};

struct SynthOutput {
  SessionFile session;
  AnnotationFile annotations;
};

SynthOutput synthesize(const SynthSpec& spec);

/// Screen-guided training: 5 repetitions of 3 s moderate ramp contractions per
/// class, then 20 snaps each in its own 1 s capture period.
SynthSpec training_spec(std::uint64_t seed, std::uint64_t subject_seed);

/// Snap-free mock ADL recording cycling through `profiles` in equal blocks.
SynthSpec adl_spec(std::uint64_t seed, std::uint64_t subject_seed, double duration,
                   const std::vector<AdlProfile>& profiles);

/// Usage session: `snap_count` snaps as on/off pairs spread evenly over the
/// duration, a 3 s contraction inside every on/off pair when `contractions`
/// is set, and continuous ADL activity cycling through `profiles`.
SynthSpec session_spec(std::uint64_t seed, std::uint64_t subject_seed, double duration,
                       std::size_t snap_count, const std::vector<AdlProfile>& profiles,
                       bool contractions = true);

std::vector<AdlProfile> all_profiles();

}  // namespace snapgate::synth
