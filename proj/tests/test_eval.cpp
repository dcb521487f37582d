#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "snapgate/error.hpp"
#include "snapgate/eval.hpp"
#include "snapgate/features.hpp"
#include "test_support.hpp"

using namespace snapgate;
using namespace snapgate::eval;
using snapgate::testing::Gen;

namespace {

ConfusionCounts run(std::vector<double> toggles, std::vector<double> truth, std::size_t total,
                    double tol = 1.0) {
  return confusion(std::span<const double>(toggles), GroundTruth{std::move(truth), tol}, total);
}

/// Size of a maximum matching between toggles and truth instants, by
/// exhaustive search over assignments.
std::size_t max_matching(const std::vector<double>& toggles, const std::vector<double>& truth, double tol,
                         std::size_t i = 0, std::vector<bool> used = {}) {
  if (used.empty()) used.assign(truth.size(), false);
  if (i == toggles.size()) return 0;
  std::size_t best = max_matching(toggles, truth, tol, i + 1, used);
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (used[j] || std::abs(toggles[i] - truth[j]) > tol + 1e-9) continue;
    used[j] = true;
    best = std::max(best, 1 + max_matching(toggles, truth, tol, i + 1, used));
    used[j] = false;
  }
  return best;
}

/// Counts every distinct threshold directly, without sorting.
std::set<std::pair<double, double>> brute_force_roc(const std::vector<ScoredSample>& s, ScoreOrder order) {
  double pos = 0, neg = 0;
  for (const auto& x : s) (x.positive ? pos : neg) += 1;
  std::set<std::pair<double, double>> out{{0.0, 0.0}};
  for (const auto& thr : s) {
    double tp = 0, fp = 0;
    for (const auto& x : s) {
      const bool accepted = order == ScoreOrder::LowerIsPositive ? x.score <= thr.score : x.score >= thr.score;
      if (accepted) (x.positive ? tp : fp) += 1;
    }
    out.insert({fp / neg, tp / pos});
  }
  return out;
}

}  // namespace

TEST(Confusion, Examples) {
  EXPECT_EQ(run({3.1, 10.0}, {3.0}, 1000), (ConfusionCounts{1, 1, 0, 998}));
  EXPECT_EQ(run({}, {5.0}, 1000), (ConfusionCounts{0, 0, 1, 999}));
  std::vector<double> truth, toggles;
  for (int i = 0; i < 40; ++i) {
    truth.push_back(10.0 + 15.0 * i);
    toggles.push_back(10.3 + 15.0 * i);
  }
  EXPECT_EQ(run(toggles, truth, 12000), (ConfusionCounts{40, 0, 0, 11960}));
}

TEST(Confusion, ToleranceBoundaryIsInclusive) {
  EXPECT_EQ(run({4.0}, {3.0}, 10).tp, 1u);
  EXPECT_EQ(run({2.0}, {3.0}, 10).tp, 1u);
  EXPECT_EQ(run({4.001}, {3.0}, 10), (ConfusionCounts{0, 1, 1, 8}));
}

TEST(Confusion, NearestPairWinsAndMatchingIsGreedy) {
  EXPECT_EQ(run({3.9}, {3.0, 4.5}, 10), (ConfusionCounts{1, 0, 1, 8}));
  // 3.0 pairs with 3.0 first; the leftovers are too far apart to match.
  EXPECT_EQ(run({2.1, 3.0}, {3.0, 3.9}, 10), (ConfusionCounts{1, 1, 1, 7}));
}

TEST(Confusion, AccountingOverflowThrows) {
  EXPECT_EQ(run({1.0, 10.0}, {5.0}, 3), (ConfusionCounts{0, 2, 1, 0}));
  EXPECT_THROW(run({1.0, 10.0}, {5.0}, 2), AccountingError);
  EXPECT_THROW(run({1.0}, {1.0}, 10, -1.0), std::invalid_argument);
}

TEST(Confusion, EventOverloadCountsOnlyToggles) {
  std::vector<GateEvent> events{{3.1, EventKind::ToggledToInput},
                                {3.2, EventKind::Command, 0, 0.5},
                                {9.0, EventKind::ToggledToSleep},
                                {9.1, EventKind::Suppressed, 1}};
  EXPECT_EQ(confusion(events, GroundTruth{{3.0, 9.4}, 1.0}, 100), (ConfusionCounts{2, 0, 0, 98}));
}

TEST(ConfusionProperties, CountsBalanceAndMatchOptimumWhenTruthIsSparse) {
  Gen g(50);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> truth;
    double t = g.real(0, 3);
    for (std::size_t i = 0, n = g.size(0, 6); i < n; ++i) {
      truth.push_back(t);
      t += g.real(2.01, 6.0);  // more than twice the tolerance apart
    }
    std::vector<double> toggles(g.size(0, 8));
    for (auto& x : toggles) x = g.real(0, t + 1);
    const auto c = run(toggles, truth, 100);
    EXPECT_EQ(c.tp + c.fp, toggles.size());
    EXPECT_EQ(c.tp + c.fn, truth.size());
    EXPECT_EQ(c.tp + c.fp + c.fn + c.tn, 100u);
    EXPECT_EQ(c.tp, max_matching(toggles, truth, 1.0));
  }
}

TEST(ConfusionProperties, GreedyIsAtLeastHalfTheOptimumAndOrderFree) {
  Gen g(51);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> truth(g.size(0, 5)), toggles(g.size(0, 5));
    for (auto& x : truth) x = g.real(0, 6);
    for (auto& x : toggles) x = g.real(0, 6);
    const auto c = run(toggles, truth, 50);
    const std::size_t best = max_matching(toggles, truth, 1.0);
    EXPECT_LE(c.tp, best);
    EXPECT_GE(2 * c.tp, best);
    std::shuffle(toggles.begin(), toggles.end(), g.engine());
    std::shuffle(truth.begin(), truth.end(), g.engine());
    EXPECT_EQ(run(toggles, truth, 50), c);
  }
}

TEST(Roc, PerfectSeparationReachesTopLeft) {
  const std::vector<ScoredSample> s{{1, true}, {2, true}, {5, false}, {6, false}};
  const auto pts = roc(s, ScoreOrder::LowerIsPositive);
  EXPECT_NE(std::find(pts.begin(), pts.end(), RocPoint{0.0, 1.0}), pts.end());
  EXPECT_EQ(pts.front(), (RocPoint{0, 0}));
  EXPECT_EQ(pts.back(), (RocPoint{1, 1}));
  EXPECT_DOUBLE_EQ(auc(pts), 1.0);
}

TEST(Roc, IdenticalScoreMultisetsStayOnDiagonal) {
  std::vector<ScoredSample> s;
  for (double v : {1.0, 2.0, 2.0, 3.0, 7.0}) {
    s.push_back({v, true});
    s.push_back({v, false});
  }
  for (auto order : {ScoreOrder::LowerIsPositive, ScoreOrder::HigherIsPositive}) {
    const auto pts = roc(s, order);
    for (const auto& p : pts) EXPECT_DOUBLE_EQ(p.fpr, p.tpr);
    EXPECT_DOUBLE_EQ(auc(pts), 0.5);
  }
}

TEST(Roc, MatchesPerThresholdCounting) {
  Gen g(52);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ScoredSample> s(g.size(2, 30));
    for (auto& x : s) x = {static_cast<double>(g.integer(0, 10)), g.coin()};
    s[0].positive = true;
    s[1].positive = false;
    const auto order = g.coin() ? ScoreOrder::LowerIsPositive : ScoreOrder::HigherIsPositive;
    const auto pts = roc(s, order);
    std::set<std::pair<double, double>> got;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      got.insert({pts[i].fpr, pts[i].tpr});
      if (i > 0) {
        EXPECT_GE(pts[i].fpr, pts[i - 1].fpr);
        EXPECT_GE(pts[i].tpr, pts[i - 1].tpr);
      }
    }
    EXPECT_EQ(got, brute_force_roc(s, order));
  }
}

TEST(Roc, NeedsBothClasses) {
  const std::vector<ScoredSample> s{{1, true}, {2, true}};
  EXPECT_THROW(roc(s, ScoreOrder::LowerIsPositive), std::invalid_argument);
}

TEST(Auc, Examples) {
  EXPECT_EQ(auc(std::vector<RocPoint>{{0, 0}, {0, 1}, {1, 1}}), 1.0);
  EXPECT_EQ(auc(std::vector<RocPoint>{{0, 0}, {1, 1}}), 0.5);
  // 0.5*(0+0.8)/2 + 0.5*(0.8+1)/2
  EXPECT_NEAR(auc(std::vector<RocPoint>{{0, 0}, {0.5, 0.8}, {1, 1}}), 0.65, 1e-15);
}

TEST(Auc, RejectsUnsortedOrPartialCurves) {
  EXPECT_THROW(auc(std::vector<RocPoint>{{0, 0}, {0.6, 0.5}, {0.4, 0.7}, {1, 1}}), std::invalid_argument);
  EXPECT_THROW(auc(std::vector<RocPoint>{{0, 0}, {0.5, 1}}), std::invalid_argument);
  EXPECT_THROW(auc(std::vector<RocPoint>{{0, 0}}), std::invalid_argument);
}

TEST(AucProperties, FlippingTheScoreOrderReflects) {
  Gen g(53);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ScoredSample> s(g.size(2, 40));
    for (auto& x : s) x = {g.real(0, 1), g.coin()};
    s[0].positive = true;
    s[1].positive = false;
    const double lo = auc(roc(s, ScoreOrder::LowerIsPositive));
    const double hi = auc(roc(s, ScoreOrder::HigherIsPositive));
    EXPECT_NEAR(lo + hi, 1.0, 1e-12);
    // Mann-Whitney: probability a random positive outranks a random negative.
    double wins = 0, pairs = 0;
    for (const auto& p : s) {
      if (!p.positive) continue;
      for (const auto& n : s) {
        if (n.positive) continue;
        pairs += 1;
        wins += p.score < n.score ? 1.0 : (p.score == n.score ? 0.5 : 0.0);
      }
    }
    EXPECT_NEAR(lo, wins / pairs, 1e-12);
  }
}

TEST(RejectionBaseline, DegenerateThresholds) {
  const std::vector<TrainingOutcome> training{{0.9, true}, {0.6, true}, {0.5, false}, {0.99, true}};
  const std::vector<AdlOutcome> adl{{0.8, true}, {0.4, false}, {0.7, true}, {0.95, false}};
  const auto r = rejection_baseline(adl, training);
  EXPECT_EQ(r.thresholds.front(), 0.0);
  EXPECT_GT(r.thresholds.back(), 1.0);
  EXPECT_EQ(r.points.front(), (RocPoint{0.5, 0.75}));
  EXPECT_EQ(r.points.back(), (RocPoint{0.0, 0.0}));
  EXPECT_EQ(r.curve.front(), (RocPoint{0, 0}));
  EXPECT_EQ(r.curve.back(), (RocPoint{1, 1}));
  EXPECT_NO_THROW(auc(r.curve));

  const auto fixed = rejection_baseline(adl, training, {0.75});
  ASSERT_EQ(fixed.points.size(), 1u);
  EXPECT_EQ(fixed.points[0], (RocPoint{0.25, 0.5}));
}

TEST(RejectionBaseline, NeedsBothSets) {
  const std::vector<TrainingOutcome> training{{0.9, true}};
  EXPECT_THROW(rejection_baseline({}, training), std::invalid_argument);
}

TEST(ClassDistribution, Examples) {
  const std::vector<std::size_t> rest(20, 4);
  EXPECT_EQ(class_activation_distribution(rest, 5), (std::vector<double>{0, 0, 0, 0, 1}));
  std::vector<std::size_t> even;
  for (std::size_t k = 0; k < 5; ++k) even.insert(even.end(), 7, k);
  for (double f : class_activation_distribution(even, 5)) EXPECT_DOUBLE_EQ(f, 0.2);
  EXPECT_THROW(class_activation_distribution(std::vector<std::size_t>{5}, 5), std::out_of_range);
}

TEST(ClassDistribution, MatchesCountingOnSyntheticAdl) {
  const auto& fx = snapgate::testing::trained();
  const auto windows = windowize(fx.calibration.session.frames, fx.models.pipeline.classifier_window);
  std::vector<std::size_t> predictions;
  for (const auto& w : windows) {
    predictions.push_back(fx.models.lda.predict(features::hudgins_td(w.view(), fx.models.pipeline.eps)));
  }
  const auto dist = class_activation_distribution(predictions, 5);
  double total = 0.0;
  for (std::size_t k = 0; k < 5; ++k) {
    const auto n = std::count(predictions.begin(), predictions.end(), k);
    EXPECT_DOUBLE_EQ(dist[k], static_cast<double>(n) / static_cast<double>(predictions.size()));
    total += dist[k];
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}
