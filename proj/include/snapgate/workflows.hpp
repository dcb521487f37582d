#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "snapgate/eval.hpp"
#include "snapgate/event_log.hpp"
#include "snapgate/gate.hpp"
#include "snapgate/session_io.hpp"

namespace snapgate {

inline constexpr std::size_t kExpectedTemplates = 20;

struct TrainOptions {
  PipelineConfig pipeline;
  LdaOptions lda;
  std::size_t vote_length = 5;
  std::size_t vote_quorum = 3;
};

/// Classifier training windows: every classifier window lying entirely inside
/// a class interval, labelled with that class.
struct LabeledWindows {
  std::vector<Window> windows;
  std::vector<int> labels;  // index into default_class_labels()
};

LabeledWindows class_windows(const SessionFile& session, const AnnotationFile& annotations,
                             const PipelineConfig& pipeline);

/// One template per annotated snap instant t, cut from
/// [t - template_lead, t - template_lead + template_seconds).
std::vector<Template> snap_templates(const SessionFile& session, const AnnotationFile& annotations,
                                     const PipelineConfig& pipeline);

/// Fits the classifier, speed calibration and wake templates. The threshold
/// stays unset until calibrate(). Throws FitError naming any class without
/// annotated intervals.
ModelBundle train(const SessionFile& session, const AnnotationFile& annotations,
                  const TrainOptions& options = {});

/// Calibrates the wake threshold against a snap-free recording and stores
/// s*, the threshold and the ROC table in the bundle. Throws CalibrationError.
void calibrate(ModelBundle& models, const SessionFile& adl, const std::vector<double>& s_grid);

/// Drives a fresh engine from `next` until it returns nothing. Frames the
/// buffer refuses (out of order, wrong width) are counted and skipped.
using FrameSource = std::function<std::optional<EmgFrame>()>;
SessionResult run_stream(const FrameSource& next, const ModelBundle& models,
                         const EngineConfig& config = {});
SessionResult run_frames(const std::vector<EmgFrame>& frames, const ModelBundle& models,
                         const EngineConfig& config = {});

struct EvalOptions {
  double tolerance = 1.0;
};

struct EvalReport {
  std::vector<std::string> classes;
  std::size_t truth_events = 0;
  std::size_t toggles = 0;
  std::size_t total_decisions = 0;
  eval::ConfusionCounts counts;
  double tpr = 0.0;
  double fpr_per_step = 0.0;
  std::size_t silence_violations = 0;  // Command events while asleep
  /// Share of classifier events (Command and Suppressed) per class.
  std::vector<double> class_distribution;
  /// Present when the log carries wake scores: a candidate is positive when
  /// within tolerance of a snap instant.
  std::optional<double> fpr_per_candidate;
  std::vector<eval::RocPoint> wake_roc;
  std::optional<double> wake_auc;
};

EvalReport evaluate(const EventLog& log, const AnnotationFile& annotations,
                    const EvalOptions& options = {});

/// Compares confidence rejection with the wake detector on the same data.
/// Rejection TPR comes from the classifier's training windows, FPR from every
/// classifier window of the ADL recording; the wake ROC scores the model's
/// templates leave-one-out against every candidate of the ADL recording.
struct RejectionAnalysis {
  eval::RejectionCurve rejection;
  double rejection_auc = 0.0;
  std::vector<eval::RocPoint> wake_roc;
  double wake_auc = 0.0;
  double training_accuracy = 0.0;
  double adl_active_fraction = 0.0;
  std::vector<double> adl_class_distribution;
};

RejectionAnalysis analyze_rejection(const ModelBundle& models, const SessionFile& training,
                                    const AnnotationFile& training_annotations,
                                    const SessionFile& adl);

/// Plain-text report; identical inputs give identical bytes.
std::string format_report(const EvalReport& report, const RejectionAnalysis* rejection = nullptr);
std::string format_calibration(const CalibrationResult& result);

}  // namespace snapgate
