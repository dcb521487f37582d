#include "snapgate/gate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "snapgate/features.hpp"
#include "snapgate/log.hpp"

namespace snapgate {
namespace {

// Absorbs rounding in timestamp differences such as 3.995 - 2.995.
constexpr double kTimeSlack = 1e-9;

bool fires(std::size_t seen, const WindowSpec& spec) {
  return seen >= spec.length_samples && (seen - spec.length_samples) % spec.increment_samples == 0;
}

Template template_from_frames(const std::deque<std::vector<double>>& frames, std::size_t channels) {
  std::vector<double> values;
  values.reserve(frames.size() * channels);
  for (const auto& f : frames) values.insert(values.end(), f.begin(), f.end());
  return {std::move(values), frames.size(), channels};
}

}  // namespace

std::size_t PipelineConfig::template_samples() const {
  return static_cast<std::size_t>(std::lround(template_seconds * sample_rate));
}

std::size_t PipelineConfig::template_frames() const {
  return window_count(template_samples(), wake_window);
}

void PipelineConfig::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw ConfigError("sample rate must be positive");
  }
  if (channels == 0) throw ConfigError("channel count must be positive");
  try {
    classifier_window.validate();
    wake_window.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (classifier_window.length_samples < 3) {
    throw ConfigError("classifier window must hold at least 3 samples");
  }
  if (!(eps >= 0.0)) throw ConfigError("eps must be >= 0");
  if (template_frames() == 0) throw ConfigError("template shorter than one RMS window");
  if (!(template_lead >= 0.0 && template_lead <= template_seconds)) {
    throw ConfigError("template lead must lie within the template");
  }
}

PipelineConfig PipelineConfig::for_sample_rate(double sample_rate, std::size_t channels) {
  PipelineConfig config;
  config.sample_rate = sample_rate;
  config.channels = channels;
  config.classifier_window = WindowSpec::from_ms(200.0, 100.0, sample_rate);
  config.wake_window = WindowSpec::from_ms(150.0, 50.0, sample_rate);
  config.validate();
  return config;
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ToggledToInput: return "ToggledToInput";
    case EventKind::ToggledToSleep: return "ToggledToSleep";
    case EventKind::Command: return "Command";
    case EventKind::Suppressed: return "Suppressed";
  }
  return "?";
}

std::optional<EventKind> event_kind_from_string(const std::string& name) {
  for (auto kind : {EventKind::ToggledToInput, EventKind::ToggledToSleep, EventKind::Command,
                    EventKind::Suppressed}) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

StepResult gate_step(const ModeState& state, const std::optional<ClassifierOutput>& output,
                     bool wake_detection, double time, const GateConfig& config,
                     std::optional<double> wake_score) {
  StepResult result{state, {}};
  if (wake_detection && time - state.last_toggle_time >= config.refractory - kTimeSlack) {
    result.state.mode = state.mode == Mode::Sleep ? Mode::Input : Mode::Sleep;
    result.state.last_toggle_time = time;
    GateEvent e;
    e.time = time;
    e.kind = result.state.mode == Mode::Input ? EventKind::ToggledToInput
                                              : EventKind::ToggledToSleep;
    e.score = wake_score;
    result.events.push_back(e);
    return result;
  }
  if (output) {
    GateEvent e;
    e.time = time;
    e.class_index = output->class_index;
    if (state.mode == Mode::Input) {
      e.kind = EventKind::Command;
      e.speed = output->speed;
    } else {
      e.kind = EventKind::Suppressed;
    }
    result.events.push_back(e);
  }
  return result;
}

// ---------------------------------------------------------------------------

std::vector<double> default_s_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(i / 10.0);
  return grid;
}

CalibrationResult calibrate_threshold(std::span<const double> pairwise,
                                      std::span<const double> positive_scores,
                                      std::span<const double> negative_scores,
                                      std::span<const double> s_grid) {
  if (s_grid.empty()) throw std::invalid_argument("s grid must not be empty");
  if (!std::is_sorted(s_grid.begin(), s_grid.end())) {
    throw std::invalid_argument("s grid must be sorted ascending");
  }
  if (positive_scores.empty() || negative_scores.empty()) {
    throw std::invalid_argument("calibration needs positive and negative scores");
  }

  CalibrationResult result;
  for (double s : s_grid) {
    CalibrationPoint p;
    p.s = s;
    p.threshold = compute_threshold(pairwise, s);
    const auto below = [&](double v) { return v < p.threshold; };
    p.tpr = static_cast<double>(std::count_if(positive_scores.begin(), positive_scores.end(), below)) /
            static_cast<double>(positive_scores.size());
    p.fpr = static_cast<double>(std::count_if(negative_scores.begin(), negative_scores.end(), below)) /
            static_cast<double>(negative_scores.size());
    result.roc.push_back(p);
  }

  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < result.roc.size(); ++i) {
    if (result.roc[i].fpr == 0.0 && result.roc[i].tpr > 0.0) usable.push_back(i);
  }
  if (usable.empty()) {
    const auto best = std::min_element(result.roc.begin(), result.roc.end(),
                                       [](const CalibrationPoint& a, const CalibrationPoint& b) {
                                         if (a.fpr != b.fpr) return a.fpr < b.fpr;
                                         return a.tpr > b.tpr;
                                       });
    throw CalibrationError("no threshold in the s grid rejects every negative while accepting "
                           "any positive; best point s=" + std::to_string(best->s) +
                               " tpr=" + std::to_string(best->tpr) +
                               " fpr=" + std::to_string(best->fpr),
                           *best, result.roc);
  }
  // With FPR fixed at zero the distance to (0, 1) is 1 - TPR.
  double best_tpr = 0.0;
  for (auto i : usable) best_tpr = std::max(best_tpr, result.roc[i].tpr);
  std::vector<std::size_t> tied;
  for (auto i : usable) {
    if (result.roc[i].tpr == best_tpr) tied.push_back(i);
  }
  result.selected = result.roc[tied[(tied.size() - 1) / 2]];
  return result;
}

std::vector<double> leave_one_out_scores(std::span<const Template> templates) {
  const std::size_t m = templates.size();
  if (m < 2) throw std::invalid_argument("leave-one-out needs at least two templates");
  std::vector<double> sums(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = dtw_distance(templates[i], templates[j]);
      sums[i] += d;
      sums[j] += d;
    }
  }
  for (auto& s : sums) s /= static_cast<double>(m - 1);
  return sums;
}

std::vector<Template> candidate_templates(std::span<const EmgFrame> frames,
                                          const PipelineConfig& config) {
  config.validate();
  const auto& spec = config.wake_window;
  const std::size_t needed = config.template_frames();
  SignalBuffer buffer(spec.length_samples, config.channels, 1.0 / config.sample_rate);
  std::deque<std::vector<double>> rms_frames;
  std::size_t seen = 0;
  std::vector<Template> out;
  for (const auto& frame : frames) {
    if (buffer.push(frame) == PushOutcome::ResetOnGap) {
      seen = 0;
      rms_frames.clear();
    }
    ++seen;
    if (!fires(seen, spec)) continue;
    rms_frames.push_back(features::rms(buffer.latest(spec.length_samples)));
    if (rms_frames.size() > needed) rms_frames.pop_front();
    if (rms_frames.size() == needed) out.push_back(template_from_frames(rms_frames, config.channels));
  }
  return out;
}

CalibrationResult calibrate_threshold(const CalibrationSet& set, const PipelineConfig& config,
                                      std::span<const double> s_grid) {
  if (set.negative_stream.size() >= 2) {
    const double span_s = set.negative_stream.back().timestamp - set.negative_stream.front().timestamp;
    if (span_s < 60.0 - 1.0 / config.sample_rate) {
      log_warn("negative calibration stream covers only " + std::to_string(span_s) +
               " s; at least 60 s is expected");
    }
  }
  const auto pairwise = pairwise_distances(set.positive_templates);
  const auto positives = leave_one_out_scores(set.positive_templates);
  const auto candidates = candidate_templates(set.negative_stream, config);
  if (candidates.empty()) throw ConfigError("negative stream shorter than one candidate template");
  std::vector<double> negatives;
  negatives.reserve(candidates.size());
  for (const auto& c : candidates) negatives.push_back(score(c, set.positive_templates));
  return calibrate_threshold(pairwise, positives, negatives, s_grid);
}

// ---------------------------------------------------------------------------

void ModelBundle::validate_for_inference() const {
  pipeline.validate();
  if (lda.dimensions() != 4 * pipeline.channels) {
    throw ConfigError("classifier expects " + std::to_string(lda.dimensions()) +
                      " features but the pipeline produces " +
                      std::to_string(4 * pipeline.channels));
  }
  if (speed.active_mav.size() != lda.classes() || speed.rest_class >= lda.classes()) {
    throw ConfigError("speed calibration does not match the classifier classes");
  }
  wake.validate();
  for (const auto& t : wake.templates) {
    if (t.channels() != pipeline.channels || t.length() != pipeline.template_frames()) {
      throw ConfigError("wake template shape does not match the pipeline windowing");
    }
  }
  if (!wake.threshold) {
    throw ConfigError("wake threshold is not calibrated; run calibrate first");
  }
}

GateEngine::GateEngine(const ModelBundle& models, EngineConfig config)
    : models_(models),
      config_(config),
      threshold_(0.0),
      buffer_(std::max(models.pipeline.classifier_window.length_samples,
                       models.pipeline.wake_window.length_samples),
              models.pipeline.channels, 1.0 / models.pipeline.sample_rate),
      vote_(models.wake.vote_length, models.wake.vote_quorum) {
  models_.validate_for_inference();
  threshold_ = *models_.wake.threshold;
}

void GateEngine::reset_phases() {
  since_reset_ = 0;
  rms_frames_.clear();
  vote_.reset();
}

void GateEngine::push(const EmgFrame& frame, std::vector<GateEvent>& events) {
  const auto& pipeline = models_.pipeline;
  if (buffer_.push(config_.prefilter ? config_.prefilter(frame) : frame) == PushOutcome::ResetOnGap) {
    reset_phases();
    ++stats_.gap_resets;
  }
  ++since_reset_;
  ++stats_.frames;
  stats_.last_time = frame.timestamp;

  std::optional<ClassifierOutput> output;
  if (fires(since_reset_, pipeline.classifier_window)) {
    const Window w = buffer_.latest(pipeline.classifier_window.length_samples);
    const auto x = features::hudgins_td(w, pipeline.eps);
    const Eigen::VectorXd scores = models_.lda.discriminants(x);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < scores.size(); ++i) {
      if (scores(i) > scores(best)) best = i;
    }
    const double norm = (scores.array() - scores(best)).exp().sum();
    ClassifierOutput out{static_cast<std::size_t>(best), 0.0};
    out.speed = proportional_speed(w, models_.speed, out.class_index);
    output = out;
    ++stats_.classifier_decisions;
    if (config_.keep_trace) {
      decisions_.push_back({frame.timestamp, out.class_index, out.speed, 1.0 / norm});
    }
  }

  bool scored = false;
  bool detection = false;
  std::optional<double> wake_score;
  if (fires(since_reset_, pipeline.wake_window)) {
    rms_frames_.push_back(features::rms(buffer_.latest(pipeline.wake_window.length_samples)));
    if (rms_frames_.size() > pipeline.template_frames()) rms_frames_.pop_front();
    if (rms_frames_.size() == pipeline.template_frames()) {
      const Template candidate = template_from_frames(rms_frames_, pipeline.channels);
      const double sc = score(candidate, models_.wake);
      const bool below = sc < threshold_;
      detection = vote_.step(below);
      scored = true;
      wake_score = sc;
      ++stats_.wake_steps;
      if (below) ++stats_.below_threshold;
      if (detection) ++stats_.detections;
      if (config_.keep_trace) wake_decisions_.push_back({frame.timestamp, sc, below, detection});
    }
  }

  if (output || scored) {
    auto step = gate_step(state_, output, detection, frame.timestamp, config_.gate, wake_score);
    state_ = step.state;
    events.insert(events.end(), step.events.begin(), step.events.end());
  }
}

SessionResult run_session(std::span<const EmgFrame> frames, const ModelBundle& models,
                          const EngineConfig& config) {
  GateEngine engine(models, config);
  SessionResult result;
  for (const auto& f : frames) engine.push(f, result.events);
  result.stats = engine.stats();
  result.decisions = engine.decisions();
  result.wake_decisions = engine.wake_decisions();
  return result;
}

}  // namespace snapgate
