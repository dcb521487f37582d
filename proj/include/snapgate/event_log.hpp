#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "snapgate/gate.hpp"

namespace snapgate {

/// Newline-delimited JSON records. The first line names the schema and the
/// class labels; then one record per event in time order:
///
///   {"format":"snapgate-events","version":1,"classes":[...]}
///   {"time":3.295,"kind":"ToggledToInput","score":41.2}
///   {"time":3.395,"kind":"Command","class":"HandOpen","speed":0.7}
///   {"time":3.395,"kind":"WakeScore","score":57.9,"below":false}   (trace only)
///   {"time":599.995,"kind":"SessionEnd","frames":120000,...}
struct EventLog {
  static constexpr int kVersion = 1;

  std::vector<std::string> classes;
  std::vector<GateEvent> events;
  std::vector<WakeDecision> wake_scores;  // present when the run kept a trace
  std::optional<SessionStats> summary;
  std::optional<double> threshold;
};

EventLog make_event_log(const SessionResult& result, const ModelBundle& models);

void write_event_log(std::ostream& out, const EventLog& log);
void write_event_log(const std::filesystem::path& path, const EventLog& log);
EventLog read_event_log(std::istream& in);
EventLog read_event_log(const std::filesystem::path& path);

}  // namespace snapgate
