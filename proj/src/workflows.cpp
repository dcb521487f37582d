#include "snapgate/workflows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "snapgate/error.hpp"
#include "snapgate/features.hpp"
#include "snapgate/log.hpp"

namespace snapgate {
namespace {

void check_session(const SessionFile& session, const PipelineConfig& pipeline) {
  if (session.channels != pipeline.channels) {
    throw ConfigError("session has " + std::to_string(session.channels) + " channels, the pipeline expects " +
                      std::to_string(pipeline.channels));
  }
  if (std::abs(session.sample_rate - pipeline.sample_rate) > 1e-9) {
    throw ConfigError("session sample rate " + format_number(session.sample_rate) +
                      " Hz does not match the pipeline's " + format_number(pipeline.sample_rate) + " Hz");
  }
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

bool near_any(double t, const std::vector<double>& truth, double tolerance) {
  const auto it = std::lower_bound(truth.begin(), truth.end(), t - tolerance - 1e-9);
  return it != truth.end() && *it <= t + tolerance + 1e-9;
}

}  // namespace

LabeledWindows class_windows(const SessionFile& session, const AnnotationFile& annotations,
                             const PipelineConfig& pipeline) {
  const auto& labels = default_class_labels();
  const auto& spec = pipeline.classifier_window;
  const auto& frames = session.frames;
  LabeledWindows out;
  for (const auto& iv : annotations.intervals) {
    const auto it = std::find(labels.begin(), labels.end(), iv.label);
    if (it == labels.end()) continue;
    const auto first = std::lower_bound(frames.begin(), frames.end(), iv.start,
                                        [](const EmgFrame& f, double t) { return f.timestamp < t; });
    const auto last = std::lower_bound(first, frames.end(), iv.end,
                                       [](const EmgFrame& f, double t) { return f.timestamp < t; });
    for (auto& w : windowize(std::span<const EmgFrame>(first, last), spec)) {
      out.windows.push_back(std::move(w));
      out.labels.push_back(static_cast<int>(it - labels.begin()));
    }
  }
  return out;
}

std::vector<Template> snap_templates(const SessionFile& session, const AnnotationFile& annotations,
                                     const PipelineConfig& pipeline) {
  const auto& frames = session.frames;
  const std::size_t n = pipeline.template_samples();
  const double half_sample = 0.5 / pipeline.sample_rate;
  std::vector<Template> out;
  for (double t : annotations.snap_times()) {
    const double begin = t - pipeline.template_lead;
    const auto first = std::lower_bound(frames.begin(), frames.end(), begin - half_sample,
                                        [](const EmgFrame& f, double x) { return f.timestamp < x; });
    if (frames.end() - first < static_cast<std::ptrdiff_t>(n) || begin < -half_sample) {
      log_warn("snap at " + format_number(t) + " s lacks a full template span; skipped");
      continue;
    }
    const auto windows = windowize(std::span<const EmgFrame>(first, first + static_cast<std::ptrdiff_t>(n)),
                                   WindowSpec{n, n});
    out.push_back(make_template(windows.front(), pipeline.wake_window, "snap@" + format_number(t)));
  }
  return out;
}

ModelBundle train(const SessionFile& session, const AnnotationFile& annotations,
                  const TrainOptions& options) {
  const auto& pipeline = options.pipeline;
  pipeline.validate();
  check_session(session, pipeline);
  const auto& labels = default_class_labels();

  const auto data = class_windows(session, annotations, pipeline);
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (std::find(data.labels.begin(), data.labels.end(), static_cast<int>(k)) == data.labels.end()) {
      throw FitError("annotations contain no usable intervals for class '" + labels[k] + "'");
    }
  }

  const auto d = static_cast<Eigen::Index>(4 * pipeline.channels);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(data.windows.size()), d);
  std::vector<double> mean_mav(data.windows.size());
  for (std::size_t i = 0; i < data.windows.size(); ++i) {
    const auto f = features::hudgins_td(data.windows[i], pipeline.eps);
    x.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(f.data(), d);
    mean_mav[i] = features::mean_mav(data.windows[i]);
  }
  LdaModel lda = fit_lda(x, data.labels, labels, options.lda);
  const std::size_t rest = lda.class_index(kRestLabel);
  SpeedCalibration speed = fit_speed_calibration(mean_mav, data.labels, labels.size(), rest);

  WakeModel wake;
  wake.templates = snap_templates(session, annotations, pipeline);
  wake.vote_length = options.vote_length;
  wake.vote_quorum = options.vote_quorum;
  if (wake.templates.size() != kExpectedTemplates) {
    log_warn("trained " + std::to_string(wake.templates.size()) + " wake templates; " +
             std::to_string(kExpectedTemplates) + " are expected");
  }
  wake.validate();
  log_info("trained on " + std::to_string(data.windows.size()) + " classifier windows and " +
           std::to_string(wake.templates.size()) + " wake templates");
  return ModelBundle{pipeline, std::move(lda), std::move(speed), std::move(wake), std::nullopt};
}

void calibrate(ModelBundle& models, const SessionFile& adl, const std::vector<double>& s_grid) {
  check_session(adl, models.pipeline);
  CalibrationSet set{models.wake.templates, adl.frames};
  const auto result = calibrate_threshold(set, models.pipeline, s_grid);
  models.wake.s = result.selected.s;
  models.wake.threshold = result.selected.threshold;
  models.calibration = result;
}

SessionResult run_stream(const FrameSource& next, const ModelBundle& models, const EngineConfig& config) {
  GateEngine engine(models, config);
  SessionResult result;
  while (auto frame = next()) {
    try {
      engine.push(*frame, result.events);
    } catch (const StreamOrderError& e) {
      engine.note_rejected_frame();
      log_warn(std::string("frame rejected: ") + e.what());
    } catch (const DimensionError& e) {
      engine.note_rejected_frame();
      log_warn(std::string("frame rejected: ") + e.what());
    }
  }
  result.stats = engine.stats();
  result.decisions = engine.decisions();
  result.wake_decisions = engine.wake_decisions();
  return result;
}

SessionResult run_frames(const std::vector<EmgFrame>& frames, const ModelBundle& models,
                         const EngineConfig& config) {
  std::size_t i = 0;
  return run_stream(
      [&]() -> std::optional<EmgFrame> {
        if (i == frames.size()) return std::nullopt;
        return frames[i++];
      },
      models, config);
}

EvalReport evaluate(const EventLog& log, const AnnotationFile& annotations, const EvalOptions& options) {
  EvalReport r;
  r.classes = log.classes;
  const auto truth_times = annotations.snap_times();
  r.truth_events = truth_times.size();
  if (log.summary) {
    r.total_decisions = log.summary->wake_steps;
  } else if (!log.wake_scores.empty()) {
    r.total_decisions = log.wake_scores.size();
  } else {
    throw AccountingError("event log has neither a session summary nor wake scores; cannot count decisions");
  }

  bool asleep = true;
  std::vector<std::size_t> class_counts(log.classes.size(), 0);
  std::size_t classified = 0;
  for (const auto& e : log.events) {
    if (e.kind == EventKind::ToggledToInput) asleep = false;
    if (e.kind == EventKind::ToggledToSleep) asleep = true;
    if (e.is_toggle()) ++r.toggles;
    if (e.kind == EventKind::Command && asleep) ++r.silence_violations;
    if ((e.kind == EventKind::Command || e.kind == EventKind::Suppressed) && e.class_index &&
        *e.class_index < class_counts.size()) {
      ++class_counts[*e.class_index];
      ++classified;
    }
  }
  if (classified > 0) {
    std::vector<std::size_t> predictions;
    predictions.reserve(classified);
    for (std::size_t k = 0; k < class_counts.size(); ++k) predictions.insert(predictions.end(), class_counts[k], k);
    r.class_distribution = eval::class_activation_distribution(predictions, class_counts.size());
  }

  r.counts = eval::confusion(log.events, eval::GroundTruth{truth_times, options.tolerance}, r.total_decisions);
  r.tpr = ratio(r.counts.tp, r.counts.tp + r.counts.fn);
  r.fpr_per_step = ratio(r.counts.fp, r.counts.fp + r.counts.tn);

  if (!log.wake_scores.empty()) {
    std::vector<eval::ScoredSample> samples;
    std::size_t negatives = 0;
    std::size_t negatives_below = 0;
    for (const auto& w : log.wake_scores) {
      const bool positive = near_any(w.time, truth_times, options.tolerance);
      samples.push_back({w.score, positive});
      if (!positive) {
        ++negatives;
        if (w.below_threshold) ++negatives_below;
      }
    }
    r.fpr_per_candidate = ratio(negatives_below, negatives);
    if (negatives > 0 && negatives < samples.size()) {
      r.wake_roc = eval::roc(samples, eval::ScoreOrder::LowerIsPositive);
      r.wake_auc = eval::auc(r.wake_roc);
    }
  }
  return r;
}

RejectionAnalysis analyze_rejection(const ModelBundle& models, const SessionFile& training,
                                    const AnnotationFile& training_annotations, const SessionFile& adl) {
  const auto& pipeline = models.pipeline;
  check_session(training, pipeline);
  check_session(adl, pipeline);
  const std::size_t rest = models.lda.class_index(kRestLabel);

  auto classify = [&](const Window& w) {
    const auto x = features::hudgins_td(w, pipeline.eps);
    const Eigen::VectorXd p = models.lda.posterior(x);
    Eigen::Index best = 0;
    p.maxCoeff(&best);
    return std::pair{static_cast<std::size_t>(best), p(best)};
  };

  RejectionAnalysis out;
  const auto labelled = class_windows(training, training_annotations, pipeline);
  std::vector<eval::TrainingOutcome> train_outcomes;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labelled.windows.size(); ++i) {
    const auto [k, conf] = classify(labelled.windows[i]);
    const bool ok = static_cast<int>(k) == labelled.labels[i];
    correct += ok;
    train_outcomes.push_back({conf, ok});
  }
  out.training_accuracy = ratio(correct, train_outcomes.size());

  std::vector<eval::AdlOutcome> adl_outcomes;
  std::vector<std::size_t> predictions;
  for (const auto& w : windowize(adl.frames, pipeline.classifier_window)) {
    const auto [k, conf] = classify(w);
    adl_outcomes.push_back({conf, k != rest});
    predictions.push_back(k);
  }
  if (train_outcomes.empty() || adl_outcomes.empty()) {
    throw FitError("rejection analysis needs classifier windows from both recordings");
  }
  out.adl_class_distribution = eval::class_activation_distribution(predictions, models.lda.classes());
  out.adl_active_fraction = 1.0 - out.adl_class_distribution[rest];
  out.rejection = eval::rejection_baseline(adl_outcomes, train_outcomes);
  out.rejection_auc = eval::auc(out.rejection.curve);

  std::vector<eval::ScoredSample> samples;
  for (double s : leave_one_out_scores(models.wake.templates)) samples.push_back({s, true});
  for (const auto& c : candidate_templates(adl.frames, pipeline)) {
    samples.push_back({score(c, models.wake.templates), false});
  }
  out.wake_roc = eval::roc(samples, eval::ScoreOrder::LowerIsPositive);
  out.wake_auc = eval::auc(out.wake_roc);
  return out;
}

std::string format_report(const EvalReport& r, const RejectionAnalysis* rejection) {
  std::ostringstream out;
  out << "# snapgate evaluation report\n";
  out << "truth_events " << r.truth_events << '\n';
  out << "toggles " << r.toggles << '\n';
  out << "total_decisions " << r.total_decisions << '\n';
  out << "tp " << r.counts.tp << '\n';
  out << "fp " << r.counts.fp << '\n';
  out << "fn " << r.counts.fn << '\n';
  out << "tn " << r.counts.tn << '\n';
  out << "tpr " << fixed(r.tpr) << '\n';
  out << "fpr_per_step " << fixed(r.fpr_per_step, 9) << '\n';
  if (r.fpr_per_candidate) out << "fpr_per_candidate " << fixed(*r.fpr_per_candidate, 9) << '\n';
  out << "silence_violations " << r.silence_violations << '\n';
  if (!r.class_distribution.empty()) {
    out << "\n[class_distribution]\n";
    for (std::size_t k = 0; k < r.class_distribution.size(); ++k) {
      out << (k < r.classes.size() ? r.classes[k] : std::to_string(k)) << ' ' << fixed(r.class_distribution[k])
          << '\n';
    }
  }
  if (r.wake_auc) {
    out << "\n[wake_roc]\nwake_auc " << fixed(*r.wake_auc) << "\nfpr tpr\n";
    for (const auto& p : r.wake_roc) out << fixed(p.fpr) << ' ' << fixed(p.tpr) << '\n';
  }
  if (rejection) {
    out << "\n[rejection_baseline]\n";
    out << "training_accuracy " << fixed(rejection->training_accuracy) << '\n';
    out << "adl_active_fraction " << fixed(rejection->adl_active_fraction) << '\n';
    out << "rejection_auc " << fixed(rejection->rejection_auc) << '\n';
    out << "wake_auc " << fixed(rejection->wake_auc) << '\n';
    out << "fpr tpr\n";
    for (const auto& p : rejection->rejection.curve) out << fixed(p.fpr) << ' ' << fixed(p.tpr) << '\n';
  }
  return out.str();
}

std::string format_calibration(const CalibrationResult& result) {
  std::ostringstream out;
  out << "s threshold tpr fpr\n";
  for (const auto& p : result.roc) {
    out << fixed(p.s, 2) << ' ' << fixed(p.threshold) << ' ' << fixed(p.tpr) << ' ' << fixed(p.fpr) << '\n';
  }
  out << "selected s=" << fixed(result.selected.s, 2) << " threshold=" << fixed(result.selected.threshold)
      << " tpr=" << fixed(result.selected.tpr) << " fpr=" << fixed(result.selected.fpr) << '\n';
  return out.str();
}

}  // namespace snapgate
