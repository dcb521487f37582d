#include "snapgate/event_log.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "snapgate/error.hpp"

namespace snapgate {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kFormat = "snapgate-events";

Json event_record(const GateEvent& e, const std::vector<std::string>& classes) {
  Json j;
  j["time"] = e.time;
  j["kind"] = to_string(e.kind);
  if (e.class_index) {
    if (*e.class_index >= classes.size()) throw DimensionError("event class outside label list");
    j["class"] = classes[*e.class_index];
  }
  if (e.speed) j["speed"] = *e.speed;
  if (e.score) j["score"] = *e.score;
  return j;
}

Json score_record(const WakeDecision& w) {
  Json j;
  j["time"] = w.time;
  j["kind"] = "WakeScore";
  j["score"] = w.score;
  j["below"] = w.below_threshold;
  if (w.detection) j["detection"] = true;
  return j;
}

}  // namespace

EventLog make_event_log(const SessionResult& result, const ModelBundle& models) {
  EventLog log;
  log.classes = models.lda.class_labels();
  log.events = result.events;
  log.wake_scores = result.wake_decisions;
  log.summary = result.stats;
  log.threshold = models.wake.threshold;
  return log;
}

void write_event_log(std::ostream& out, const EventLog& log) {
  Json header;
  header["format"] = kFormat;
  header["version"] = EventLog::kVersion;
  header["classes"] = log.classes;
  out << header.dump() << '\n';

  // Merge by time; a wake score is listed before the event it produced.
  std::size_t ei = 0;
  std::size_t si = 0;
  while (ei < log.events.size() || si < log.wake_scores.size()) {
    const bool take_score = si < log.wake_scores.size() &&
                            (ei == log.events.size() || log.wake_scores[si].time <= log.events[ei].time);
    if (take_score) {
      out << score_record(log.wake_scores[si++]).dump() << '\n';
    } else {
      out << event_record(log.events[ei++], log.classes).dump() << '\n';
    }
  }

  if (log.summary) {
    const auto& s = *log.summary;
    Json end;
    end["time"] = s.last_time;
    end["kind"] = "SessionEnd";
    end["frames"] = s.frames;
    end["classifier_decisions"] = s.classifier_decisions;
    end["wake_steps"] = s.wake_steps;
    end["below_threshold"] = s.below_threshold;
    end["detections"] = s.detections;
    end["gap_resets"] = s.gap_resets;
    end["rejected_frames"] = s.rejected_frames;
    if (log.threshold) end["threshold"] = *log.threshold;
    out << end.dump() << '\n';
  }
}

void write_event_log(const std::filesystem::path& path, const EventLog& log) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  write_event_log(out, log);
}

EventLog read_event_log(std::istream& in) {
  EventLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError(std::string("invalid JSON record: ") + e.what(), line_no);
    }
    try {
      if (line_no == 1) {
        if (j.value("format", "") != kFormat) throw ParseError("not a snapgate event log", 1);
        if (j.at("version").get<int>() != EventLog::kVersion) {
          throw ParseError("unsupported event log version", 1);
        }
        log.classes = j.at("classes").get<std::vector<std::string>>();
        continue;
      }
      const auto kind = j.at("kind").get<std::string>();
      const double time = j.at("time").get<double>();
      if (kind == "WakeScore") {
        log.wake_scores.push_back({time, j.at("score").get<double>(), j.at("below").get<bool>(),
                                   j.value("detection", false)});
        continue;
      }
      if (kind == "SessionEnd") {
        SessionStats s;
        s.last_time = time;
        s.frames = j.at("frames").get<std::size_t>();
        s.classifier_decisions = j.at("classifier_decisions").get<std::size_t>();
        s.wake_steps = j.at("wake_steps").get<std::size_t>();
        s.below_threshold = j.at("below_threshold").get<std::size_t>();
        s.detections = j.at("detections").get<std::size_t>();
        s.gap_resets = j.value("gap_resets", std::size_t{0});
        s.rejected_frames = j.value("rejected_frames", std::size_t{0});
        log.summary = s;
        if (j.contains("threshold")) log.threshold = j.at("threshold").get<double>();
        continue;
      }
      const auto parsed = event_kind_from_string(kind);
      if (!parsed) throw ParseError("unknown event kind '" + kind + "'", line_no);
      GateEvent e;
      e.time = time;
      e.kind = *parsed;
      if (j.contains("class")) {
        const auto name = j.at("class").get<std::string>();
        const auto it = std::find(log.classes.begin(), log.classes.end(), name);
        if (it == log.classes.end()) throw ParseError("unknown class '" + name + "'", line_no);
        e.class_index = static_cast<std::size_t>(it - log.classes.begin());
      }
      if (j.contains("speed")) e.speed = j.at("speed").get<double>();
      if (j.contains("score")) e.score = j.at("score").get<double>();
      log.events.push_back(e);
    } catch (const Json::exception& e) {
      throw ParseError(std::string("bad record: ") + e.what(), line_no);
    }
  }
  if (line_no == 0) throw ParseError("empty event log", 0);
  return log;
}

EventLog read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  return read_event_log(in);
}

}  // namespace snapgate
