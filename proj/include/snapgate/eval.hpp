#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "snapgate/gate.hpp"

namespace snapgate::eval {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct GroundTruth {
  std::vector<double> wake_times;  // annotated snap instants, sorted
  double tolerance = 1.0;
};

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Event-level accounting. Toggles are matched to truth instants greedily,
/// closest pair first, when |dt| <= tolerance; unmatched toggles are false
/// positives and unmatched instants false negatives. TN is whatever is left of
/// `total_decisions`; a negative remainder throws AccountingError.
ConfusionCounts confusion(std::span<const double> toggle_times, const GroundTruth& truth,
                          std::size_t total_decisions);
ConfusionCounts confusion(std::span<const GateEvent> events, const GroundTruth& truth,
                          std::size_t total_decisions);

enum class ScoreOrder {
  LowerIsPositive,   // wake scores: a DTW distance below threshold is a detection
  HigherIsPositive,  // classifier confidence: accepted when above threshold
};

struct ScoredSample {
  double score = 0.0;
  bool positive = false;
};

/// Threshold sweep over every distinct score, from (0,0) to (1,1), sorted by
/// FPR. Throws std::invalid_argument unless both classes are present.
std::vector<RocPoint> roc(std::span<const ScoredSample> samples, ScoreOrder order);

/// Trapezoidal area. Points must be sorted by FPR and span [0, 1].
double auc(std::span<const RocPoint> points);

struct TrainingOutcome {
  double confidence = 0.0;  // max posterior
  bool correct = false;
};

struct AdlOutcome {
  double confidence = 0.0;  // max posterior
  bool active = false;      // predicted something other than rest
};

struct RejectionCurve {
  std::vector<double> thresholds;
  std::vector<RocPoint> points;  // one per threshold
  std::vector<RocPoint> curve;   // points plus (0,0) and (1,1), sorted by FPR
};

/// Confidence-rejection baseline: at threshold c, TPR is the fraction of
/// training windows accepted (confidence >= c) and correctly classified; FPR
/// is the fraction of ADL windows accepted as an active class. An empty
/// `thresholds` sweeps 0, every observed confidence, and one value above 1.
RejectionCurve rejection_baseline(std::span<const AdlOutcome> adl,
                                  std::span<const TrainingOutcome> training,
                                  std::vector<double> thresholds = {});

/// Fraction of predictions falling in each of `classes` classes.
std::vector<double> class_activation_distribution(std::span<const std::size_t> predictions,
                                                  std::size_t classes);

}  // namespace snapgate::eval
