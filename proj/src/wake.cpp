#include "snapgate/wake.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "snapgate/error.hpp"
#include "snapgate/features.hpp"

namespace snapgate {

Template::Template(std::vector<double> values, std::size_t length, std::size_t channels,
                   std::string source_id)
    : values_(std::move(values)), length_(length), channels_(channels),
      source_id_(std::move(source_id)) {
  if (length_ < 1 || channels_ < 1) throw DimensionError("template must be non-empty");
  if (values_.size() != length_ * channels_) {
    throw DimensionError("template data size does not match T x C");
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw DimensionError("template values must be finite and >= 0");
  }
}

Template Template::from_rows(const std::vector<std::vector<double>>& rows, std::string source_id) {
  if (rows.empty()) throw DimensionError("template must be non-empty");
  const std::size_t channels = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * channels);
  for (const auto& r : rows) {
    if (r.size() != channels) throw DimensionError("ragged template rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return {std::move(values), rows.size(), channels, std::move(source_id)};
}

Template make_template(WindowView signal, const WindowSpec& rms_spec, std::string source_id) {
  const std::size_t count = window_count(signal.length(), rms_spec);
  if (count == 0) throw DimensionError("signal shorter than one RMS window");
  const std::size_t channels = signal.channels();
  std::vector<double> values;
  values.reserve(count * channels);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t start = k * rms_spec.increment_samples;
    const WindowView sub(signal.data().subspan(start * channels, rms_spec.length_samples * channels),
                         rms_spec.length_samples, channels);
    const auto r = features::rms(sub);
    values.insert(values.end(), r.begin(), r.end());
  }
  return {std::move(values), count, channels, std::move(source_id)};
}

void WakeModel::validate() const {
  if (templates.size() < 2) throw ConfigError("wake model needs at least two templates");
  const std::size_t channels = templates.front().channels();
  for (const auto& t : templates) {
    if (t.channels() != channels) throw ConfigError("wake templates differ in channel count");
  }
  if (threshold && !(*threshold >= 0.0 && std::isfinite(*threshold))) {
    throw ConfigError("wake threshold must be finite and >= 0");
  }
  if (vote_quorum < 1 || vote_quorum > vote_length) {
    throw ConfigError("vote quorum must satisfy 1 <= quorum <= length");
  }
}

double dtw_distance(const Template& a, const Template& b) {
  if (a.channels() != b.channels()) {
    throw DimensionError("DTW inputs differ in channel count");
  }
  const std::size_t rows = a.length();
  const std::size_t cols = b.length();
  const std::size_t channels = a.channels();
  auto cost = [&](std::size_t i, std::size_t j) {
    const auto x = a.frame(i);
    const auto y = b.frame(j);
    double sum = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const double diff = x[c] - y[c];
      sum += diff * diff;
    }
    return std::sqrt(sum);
  };

  std::vector<double> prev(cols);
  std::vector<double> curr(cols);
  prev[0] = cost(0, 0);
  for (std::size_t j = 1; j < cols; ++j) prev[j] = prev[j - 1] + cost(0, j);
  for (std::size_t i = 1; i < rows; ++i) {
    curr[0] = prev[0] + cost(i, 0);
    for (std::size_t j = 1; j < cols; ++j) {
      curr[j] = cost(i, j) + std::min({prev[j], curr[j - 1], prev[j - 1]});
    }
    std::swap(prev, curr);
  }
  return prev[cols - 1];
}

std::vector<double> pairwise_distances(std::span<const Template> templates) {
  if (templates.size() < 2) throw std::invalid_argument("need at least two templates");
  std::vector<double> out;
  out.reserve(templates.size() * (templates.size() - 1) / 2);
  for (std::size_t i = 0; i < templates.size(); ++i)
    for (std::size_t j = i + 1; j < templates.size(); ++j)
      out.push_back(dtw_distance(templates[i], templates[j]));
  return out;
}

double compute_threshold(std::span<const double> distances, double s) {
  if (distances.size() < 2) throw std::invalid_argument("threshold needs at least two distances");
  if (!std::isfinite(s)) throw std::invalid_argument("s must be finite");
  const auto n = static_cast<double>(distances.size());
  double mean = 0.0;
  for (double d : distances) mean += d;
  mean /= n;
  double var = 0.0;
  for (double d : distances) var += (d - mean) * (d - mean);
  return mean + s * std::sqrt(var / n);
}

double score(const Template& candidate, std::span<const Template> templates) {
  if (templates.empty()) throw std::invalid_argument("no templates to score against");
  double sum = 0.0;
  for (const auto& t : templates) sum += dtw_distance(candidate, t);
  return sum / static_cast<double>(templates.size());
}

double score(const Template& candidate, const WakeModel& model) {
  return score(candidate, std::span<const Template>(model.templates));
}

VoteState::VoteState(std::size_t length, std::size_t quorum) : length_(length), quorum_(quorum) {
  if (quorum < 1 || quorum > length) {
    throw std::invalid_argument("vote quorum must satisfy 1 <= quorum <= length");
  }
}

bool VoteState::step(bool below_threshold) {
  buffer_.push_back(below_threshold);
  if (below_threshold) ++true_count_;
  if (buffer_.size() > length_) {
    if (buffer_.front()) --true_count_;
    buffer_.pop_front();
  }
  if (true_count_ >= quorum_) {
    reset();
    return true;
  }
  return false;
}

void VoteState::reset() {
  buffer_.clear();
  true_count_ = 0;
}

}  // namespace snapgate
