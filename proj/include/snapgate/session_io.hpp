#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <string>
#include <vector>

#include "snapgate/signal.hpp"

namespace snapgate {

/// Recorded stream. Text format:
///
///   # snapgate-session v1
///   # channels: 8
///   # sample_rate: 200
///   # units: raw
///   t,c0,...,c7
///   0,3,-1,...
///
/// Numbers are written in shortest round-trip form, so write(read(f)) is
/// byte-identical for files produced by write_session.
struct SessionFile {
  int version = 1;
  std::size_t channels = kDefaultChannels;
  double sample_rate = kDefaultSampleRate;
  std::string units = "raw";
  std::vector<EmgFrame> frames;

  double duration() const;
};

SessionFile read_session(std::istream& in);
SessionFile read_session(const std::filesystem::path& path);
void write_session(std::ostream& out, const SessionFile& session);
void write_session(const std::filesystem::path& path, const SessionFile& session);

/// Parses one "t,c1,...,cC" line. Returns false on any malformed field.
bool parse_frame_line(std::string_view line, std::size_t channels, EmgFrame& frame);
std::string format_frame_line(const EmgFrame& frame);

struct Interval {
  double start = 0.0;
  double end = 0.0;
  std::string label;  // class name, "snap", or "adl:<profile>"

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline constexpr const char* kSnapLabel = "snap";
inline constexpr const char* kAdlPrefix = "adl:";

/// Labeled intervals. Text format:
///
///   # snapgate-annotations v1
///   start,end,label
///   12.5,12.5,snap
struct AnnotationFile {
  std::vector<Interval> intervals;

  /// Start times of "snap" intervals, sorted.
  std::vector<double> snap_times() const;
};

AnnotationFile read_annotations(std::istream& in);
AnnotationFile read_annotations(const std::filesystem::path& path);
void write_annotations(std::ostream& out, const AnnotationFile& annotations);
void write_annotations(const std::filesystem::path& path, const AnnotationFile& annotations);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_number(double value);
bool parse_number(std::string_view text, double& value);

}  // namespace snapgate
