#include "snapgate/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace snapgate::eval {
namespace {

constexpr double kTimeSlack = 1e-9;

}  // namespace

ConfusionCounts confusion(std::span<const double> toggle_times, const GroundTruth& truth,
                          std::size_t total_decisions) {
  if (!(truth.tolerance >= 0.0)) throw std::invalid_argument("tolerance must be >= 0");
  struct Pair {
    double gap;
    std::size_t toggle;
    std::size_t truth;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < toggle_times.size(); ++i) {
    for (std::size_t j = 0; j < truth.wake_times.size(); ++j) {
      const double gap = std::abs(toggle_times[i] - truth.wake_times[j]);
      if (gap <= truth.tolerance + kTimeSlack) pairs.push_back({gap, i, j});
    }
  }
  // Ties are broken by time order, not by position in the input, so the
  // counts do not depend on how the events were ordered.
  std::sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) {
    return std::tie(a.gap, toggle_times[a.toggle], truth.wake_times[a.truth]) <
           std::tie(b.gap, toggle_times[b.toggle], truth.wake_times[b.truth]);
  });
  std::vector<bool> toggle_used(toggle_times.size(), false);
  std::vector<bool> truth_used(truth.wake_times.size(), false);
  ConfusionCounts counts;
  for (const auto& p : pairs) {
    if (toggle_used[p.toggle] || truth_used[p.truth]) continue;
    toggle_used[p.toggle] = true;
    truth_used[p.truth] = true;
    ++counts.tp;
  }
  counts.fp = toggle_times.size() - counts.tp;
  counts.fn = truth.wake_times.size() - counts.tp;
  const std::size_t used = counts.tp + counts.fp + counts.fn;
  if (used > total_decisions) {
    throw AccountingError("total decisions (" + std::to_string(total_decisions) +
                          ") smaller than TP+FP+FN (" + std::to_string(used) + ")");
  }
  counts.tn = total_decisions - used;
  return counts;
}

ConfusionCounts confusion(std::span<const GateEvent> events, const GroundTruth& truth,
                          std::size_t total_decisions) {
  std::vector<double> toggles;
  for (const auto& e : events) {
    if (e.is_toggle()) toggles.push_back(e.time);
  }
  return confusion(toggles, truth, total_decisions);
}

std::vector<RocPoint> roc(std::span<const ScoredSample> samples, ScoreOrder order) {
  std::size_t positives = 0;
  for (const auto& s : samples) positives += s.positive ? 1 : 0;
  const std::size_t negatives = samples.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw std::invalid_argument("ROC needs at least one positive and one negative");
  }
  std::vector<ScoredSample> sorted(samples.begin(), samples.end());
  // Most-positive first, so each prefix is the accepted set at one threshold.
  std::sort(sorted.begin(), sorted.end(), [order](const ScoredSample& a, const ScoredSample& b) {
    return order == ScoreOrder::LowerIsPositive ? a.score < b.score : a.score > b.score;
  });
  std::vector<RocPoint> points{{0.0, 0.0}};
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    (sorted[i].positive ? tp : fp) += 1;
    const bool last_of_value = i + 1 == sorted.size() || sorted[i + 1].score != sorted[i].score;
    if (last_of_value) {
      points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                        static_cast<double>(tp) / static_cast<double>(positives)});
    }
  }
  return points;
}

double auc(std::span<const RocPoint> points) {
  if (points.size() < 2) throw std::invalid_argument("AUC needs at least two points");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].fpr < points[i - 1].fpr) {
      throw std::invalid_argument("ROC points must be sorted by FPR");
    }
  }
  if (points.front().fpr != 0.0 || points.back().fpr != 1.0) {
    throw std::invalid_argument("ROC points must span FPR 0 to 1");
  }
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
  }
  return area;
}

RejectionCurve rejection_baseline(std::span<const AdlOutcome> adl,
                                  std::span<const TrainingOutcome> training,
                                  std::vector<double> thresholds) {
  if (adl.empty() || training.empty()) {
    throw std::invalid_argument("rejection baseline needs ADL and training outcomes");
  }
  if (thresholds.empty()) {
    thresholds.push_back(0.0);
    for (const auto& a : adl) thresholds.push_back(a.confidence);
    for (const auto& t : training) thresholds.push_back(t.confidence);
    thresholds.push_back(std::nextafter(1.0, 2.0));
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  }
  RejectionCurve out;
  out.thresholds = thresholds;
  for (double c : thresholds) {
    std::size_t accepted_correct = 0;
    for (const auto& t : training) accepted_correct += (t.confidence >= c && t.correct) ? 1 : 0;
    std::size_t accepted_active = 0;
    for (const auto& a : adl) accepted_active += (a.confidence >= c && a.active) ? 1 : 0;
    out.points.push_back({static_cast<double>(accepted_active) / static_cast<double>(adl.size()),
                          static_cast<double>(accepted_correct) /
                              static_cast<double>(training.size())});
  }
  out.curve = out.points;
  out.curve.push_back({0.0, 0.0});
  out.curve.push_back({1.0, 1.0});
  std::sort(out.curve.begin(), out.curve.end(), [](const RocPoint& a, const RocPoint& b) {
    return std::tie(a.fpr, a.tpr) < std::tie(b.fpr, b.tpr);
  });
  out.curve.erase(std::unique(out.curve.begin(), out.curve.end()), out.curve.end());
  return out;
}

std::vector<double> class_activation_distribution(std::span<const std::size_t> predictions,
                                                  std::size_t classes) {
  if (predictions.empty()) throw std::invalid_argument("no predictions to summarize");
  std::vector<double> counts(classes, 0.0);
  for (auto p : predictions) {
    if (p >= classes) throw std::out_of_range("prediction outside class range");
    counts[p] += 1.0;
  }
  for (auto& c : counts) c /= static_cast<double>(predictions.size());
  return counts;
}

}  // namespace snapgate::eval
