#include "snapgate/session_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "snapgate/error.hpp"

namespace snapgate {
namespace {

constexpr std::string_view kSessionMagic = "# snapgate-session v1";
constexpr std::string_view kAnnotationMagic = "# snapgate-annotations v1";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

/// Splits "# key: value" header lines.
bool header_field(std::string_view line, std::string_view key, std::string_view& value) {
  if (!line.starts_with("# ")) return false;
  line.remove_prefix(2);
  if (!line.starts_with(key)) return false;
  line.remove_prefix(key.size());
  if (!line.starts_with(":")) return false;
  value = trim(line.substr(1));
  return true;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, result.ptr};
}

bool parse_number(std::string_view text, double& value) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  return result.ec == std::errc() && result.ptr == text.data() + text.size() && std::isfinite(value);
}

bool parse_frame_line(std::string_view line, std::size_t channels, EmgFrame& frame) {
  line = trim(line);
  frame.samples.clear();
  bool first = true;
  while (true) {
    const auto comma = line.find(',');
    const auto field = line.substr(0, comma);
    double v = 0.0;
    if (!parse_number(field, v)) return false;
    if (first) {
      frame.timestamp = v;
      first = false;
    } else {
      frame.samples.push_back(v);
    }
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return frame.samples.size() == channels;
}

std::string format_frame_line(const EmgFrame& frame) {
  std::string line = format_number(frame.timestamp);
  for (double v : frame.samples) {
    line += ',';
    line += format_number(v);
  }
  return line;
}

double SessionFile::duration() const {
  if (frames.empty()) return 0.0;
  return frames.back().timestamp - frames.front().timestamp + 1.0 / sample_rate;
}

SessionFile read_session(std::istream& in) {
  SessionFile session;
  std::string raw;
  std::size_t line_no = 0;
  bool have_channels = false;
  bool have_rate = false;
  bool have_column_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line_no == 1) {
      if (line != kSessionMagic) throw ParseError("missing session header '" + std::string(kSessionMagic) + "'", 1);
      continue;
    }
    std::string_view value;
    if (!have_column_header) {
      if (header_field(line, "channels", value)) {
        double c = 0;
        if (!parse_number(value, c) || c < 1 || c != std::floor(c)) throw ParseError("bad channel count", line_no);
        session.channels = static_cast<std::size_t>(c);
        have_channels = true;
        continue;
      }
      if (header_field(line, "sample_rate", value)) {
        if (!parse_number(value, session.sample_rate) || !(session.sample_rate > 0.0)) {
          throw ParseError("bad sample rate", line_no);
        }
        have_rate = true;
        continue;
      }
      if (header_field(line, "units", value)) {
        session.units = std::string(value);
        continue;
      }
      if (line.starts_with("t,") || line == "t") {
        if (!have_channels || !have_rate) throw ParseError("header lacks channels or sample_rate", line_no);
        const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
        if (columns != session.channels + 1) {
          throw ParseError("column header has " + std::to_string(columns - 1) +
                               " channels, header says " + std::to_string(session.channels),
                           line_no);
        }
        have_column_header = true;
        continue;
      }
      throw ParseError("unexpected header line", line_no);
    }
    if (line.empty()) continue;
    EmgFrame frame;
    if (!parse_frame_line(line, session.channels, frame)) {
      if (frame.samples.size() != session.channels && !frame.samples.empty()) {
        throw ParseError("row has " + std::to_string(frame.samples.size()) + " channels, expected " +
                             std::to_string(session.channels),
                         line_no);
      }
      throw ParseError("malformed row", line_no);
    }
    if (frame.timestamp < 0.0) throw ParseError("negative timestamp", line_no);
    if (!session.frames.empty() && !(frame.timestamp > session.frames.back().timestamp)) {
      throw ParseError("timestamps not strictly increasing", line_no);
    }
    session.frames.push_back(std::move(frame));
  }
  if (line_no == 0) throw ParseError("empty session file", 0);
  if (!have_column_header) throw ParseError("missing column header", line_no);
  return session;
}

SessionFile read_session(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_session(in);
}

void write_session(std::ostream& out, const SessionFile& session) {
  out << kSessionMagic << '\n'
      << "# channels: " << session.channels << '\n'
      << "# sample_rate: " << format_number(session.sample_rate) << '\n'
      << "# units: " << session.units << '\n'
      << 't';
  for (std::size_t c = 0; c < session.channels; ++c) out << ",c" << c;
  out << '\n';
  for (const auto& f : session.frames) {
    if (f.samples.size() != session.channels) throw DimensionError("frame channel count mismatch");
    out << format_frame_line(f) << '\n';
  }
}

void write_session(const std::filesystem::path& path, const SessionFile& session) {
  auto out = open_out(path);
  write_session(out, session);
}

std::vector<double> AnnotationFile::snap_times() const {
  std::vector<double> out;
  for (const auto& i : intervals) {
    if (i.label == kSnapLabel) out.push_back(i.start);
  }
  std::sort(out.begin(), out.end());
  return out;
}

AnnotationFile read_annotations(std::istream& in) {
  AnnotationFile file;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line_no == 1) {
      if (line != kAnnotationMagic) throw ParseError("missing annotation header", 1);
      continue;
    }
    if (line.empty() || line.starts_with("#") || line == "start,end,label") continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) throw ParseError("expected start,end,label", line_no);
    Interval iv;
    if (!parse_number(line.substr(0, c1), iv.start) ||
        !parse_number(line.substr(c1 + 1, c2 - c1 - 1), iv.end)) {
      throw ParseError("bad interval bounds", line_no);
    }
    iv.label = std::string(trim(line.substr(c2 + 1)));
    if (iv.label.empty()) throw ParseError("empty label", line_no);
    if (iv.start < 0.0 || iv.end < iv.start) throw ParseError("interval has negative length", line_no);
    file.intervals.push_back(std::move(iv));
  }
  if (line_no == 0) throw ParseError("empty annotation file", 0);
  return file;
}

AnnotationFile read_annotations(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_annotations(in);
}

void write_annotations(std::ostream& out, const AnnotationFile& annotations) {
  out << kAnnotationMagic << '\n' << "start,end,label\n";
  for (const auto& iv : annotations.intervals) {
    out << format_number(iv.start) << ',' << format_number(iv.end) << ',' << iv.label << '\n';
  }
}

void write_annotations(const std::filesystem::path& path, const AnnotationFile& annotations) {
  auto out = open_out(path);
  write_annotations(out, annotations);
}

}  // namespace snapgate
