#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snapgate/error.hpp"
#include "snapgate/lda.hpp"
#include "snapgate/signal.hpp"
#include "snapgate/wake.hpp"

namespace snapgate {

/// Preprocessing shared by training and runtime; persisted with the models so
/// inference cannot run with mismatched windows.
struct PipelineConfig {
  double sample_rate = kDefaultSampleRate;
  std::size_t channels = kDefaultChannels;
  WindowSpec classifier_window{40, 20};  // 200 ms / 100 ms at 200 Hz
  double eps = 0.0;                      // ZC/SSC deadband, raw units
  WindowSpec wake_window{30, 10};        // 150 ms / 50 ms at 200 Hz
  double template_seconds = 1.0;
  /// Seconds of template preceding an annotated snap instant.
  double template_lead = 0.7;

  std::size_t template_samples() const;
  /// RMS frames per 1 s template (18 with the defaults).
  std::size_t template_frames() const;
  void validate() const;

  /// Scales the millisecond windows to another sample rate.
  static PipelineConfig for_sample_rate(double sample_rate, std::size_t channels);
};

enum class Mode { Sleep, Input };

struct ModeState {
  Mode mode = Mode::Sleep;
  double last_toggle_time = -std::numeric_limits<double>::infinity();
};

enum class EventKind { ToggledToInput, ToggledToSleep, Command, Suppressed };

const char* to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(const std::string& name);

struct GateEvent {
  double time = 0.0;
  EventKind kind = EventKind::Suppressed;
  std::optional<std::size_t> class_index;
  std::optional<double> speed;
  std::optional<double> score;

  bool is_toggle() const {
    return kind == EventKind::ToggledToInput || kind == EventKind::ToggledToSleep;
  }
  friend bool operator==(const GateEvent&, const GateEvent&) = default;
};

struct ClassifierOutput {
  std::size_t class_index = 0;
  double speed = 0.0;
};

struct GateConfig {
  /// Wake detections within this many seconds of the last toggle are ignored.
  double refractory = 1.0;
};

struct StepResult {
  ModeState state;
  std::vector<GateEvent> events;
};

/// One tick of the on-demand state machine. A wake detection outside the
/// refractory period toggles the mode and consumes this tick's classifier
/// output; otherwise the output becomes a Command (Input) or Suppressed
/// (Sleep) event.
StepResult gate_step(const ModeState& state, const std::optional<ClassifierOutput>& output,
                     bool wake_detection, double time, const GateConfig& config = {},
                     std::optional<double> wake_score = std::nullopt);

// ---------------------------------------------------------------------------
// Threshold calibration

struct CalibrationPoint {
  double s = 0.0;
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

struct CalibrationResult {
  CalibrationPoint selected;
  std::vector<CalibrationPoint> roc;
};

/// No usable grid point: either every threshold admits a false positive, or
/// the only zero-FPR thresholds accept no positives.
class CalibrationError : public Error {
 public:
  CalibrationError(const std::string& what, CalibrationPoint best, std::vector<CalibrationPoint> roc)
      : Error(what), best_(best), roc_(std::move(roc)) {}
  const CalibrationPoint& best() const { return best_; }
  const std::vector<CalibrationPoint>& roc() const { return roc_; }

 private:
  CalibrationPoint best_;
  std::vector<CalibrationPoint> roc_;
};

/// 0.0, 0.1, ..., 5.0
std::vector<double> default_s_grid();

/// Sweeps s over `s_grid` (ascending). For each s the threshold is
/// compute_threshold(pairwise, s); a score counts as detected when strictly
/// below it. Among points with FPR == 0 the one nearest (0, 1) wins; ties
/// (equal TPR over a run of s values) resolve to the middle of the run.
CalibrationResult calibrate_threshold(std::span<const double> pairwise,
                                      std::span<const double> positive_scores,
                                      std::span<const double> negative_scores,
                                      std::span<const double> s_grid);

struct CalibrationSet {
  std::vector<Template> positive_templates;
  std::vector<EmgFrame> negative_stream;
};

/// Leave-one-out score of each template against the others.
std::vector<double> leave_one_out_scores(std::span<const Template> templates);

/// Every 1 s candidate template in a stream, one per RMS frame once T frames
/// are available.
std::vector<Template> candidate_templates(std::span<const EmgFrame> frames,
                                          const PipelineConfig& config);

/// Positives are scored leave-one-out; negatives are every candidate template
/// of the negative stream.
CalibrationResult calibrate_threshold(const CalibrationSet& set, const PipelineConfig& config,
                                      std::span<const double> s_grid);

// ---------------------------------------------------------------------------
// Streaming engine

struct ClassifierDecision {
  double time = 0.0;
  std::size_t class_index = 0;
  double speed = 0.0;
  double confidence = 0.0;
};

struct WakeDecision {
  double time = 0.0;
  double score = 0.0;
  bool below_threshold = false;
  bool detection = false;
};

struct SessionStats {
  std::size_t frames = 0;
  std::size_t classifier_decisions = 0;
  std::size_t wake_steps = 0;
  std::size_t below_threshold = 0;
  std::size_t detections = 0;
  std::size_t gap_resets = 0;
  std::size_t rejected_frames = 0;
  double last_time = 0.0;
};

struct EngineConfig {
  GateConfig gate;
  /// Keep every classifier decision and wake score in the session result.
  bool keep_trace = false;
  /// Conditioning applied to each frame before buffering. Empty passes frames
  /// through unchanged; the reference stream is already filtered.
  std::function<EmgFrame(const EmgFrame&)> prefilter;
};

/// Everything the engine needs to run a stream.
struct ModelBundle {
  PipelineConfig pipeline;
  LdaModel lda;
  SpeedCalibration speed;
  WakeModel wake;
  std::optional<CalibrationResult> calibration;

  /// Throws ConfigError when the models disagree with the pipeline or the
  /// wake threshold has not been calibrated.
  void validate_for_inference() const;
};

/// Single consumer of a frame stream. Classifier decisions fire every
/// classifier increment once a full window is buffered; wake scores fire every
/// RMS increment once T RMS frames exist. Events carry the timestamp of the
/// last sample of the window that produced them, and a toggle at an instant
/// precedes (and replaces) that instant's command.
class GateEngine {
 public:
  GateEngine(const ModelBundle& models, EngineConfig config = {});

  /// Processes one frame, appending any events. Throws StreamOrderError or
  /// DimensionError for a frame signal-core rejects; engine state is then
  /// unchanged.
  void push(const EmgFrame& frame, std::vector<GateEvent>& events);

  const ModeState& state() const { return state_; }
  const SessionStats& stats() const { return stats_; }
  const std::vector<ClassifierDecision>& decisions() const { return decisions_; }
  const std::vector<WakeDecision>& wake_decisions() const { return wake_decisions_; }
  void note_rejected_frame() { ++stats_.rejected_frames; }

 private:
  void reset_phases();

  ModelBundle models_;
  EngineConfig config_;
  double threshold_;
  SignalBuffer buffer_;
  std::size_t since_reset_ = 0;
  std::deque<std::vector<double>> rms_frames_;
  VoteState vote_;
  ModeState state_;
  SessionStats stats_;
  std::vector<ClassifierDecision> decisions_;
  std::vector<WakeDecision> wake_decisions_;
};

struct SessionResult {
  std::vector<GateEvent> events;
  SessionStats stats;
  std::vector<ClassifierDecision> decisions;  // filled when keep_trace
  std::vector<WakeDecision> wake_decisions;   // filled when keep_trace
};

/// Replays a recorded stream through a fresh engine.
SessionResult run_session(std::span<const EmgFrame> frames, const ModelBundle& models,
                          const EngineConfig& config = {});

}  // namespace snapgate
