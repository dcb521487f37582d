#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snapgate/signal.hpp"

namespace snapgate {

/// T x C sequence of per-channel RMS frames, row-major.
class Template {
 public:
  Template() = default;
  Template(std::vector<double> values, std::size_t length, std::size_t channels,
           std::string source_id = {});

  static Template from_rows(const std::vector<std::vector<double>>& rows,
                            std::string source_id = {});

  std::size_t length() const { return length_; }
  std::size_t channels() const { return channels_; }
  std::span<const double> frame(std::size_t t) const {
    return {values_.data() + t * channels_, channels_};
  }
  const std::vector<double>& values() const { return values_; }
  const std::string& source_id() const { return source_id_; }

 private:
  std::vector<double> values_;
  std::size_t length_ = 0;
  std::size_t channels_ = 0;
  std::string source_id_;
};

/// Per-channel RMS over windows of `rms_spec` across `signal` (e.g. 1 s of raw
/// EMG at 150 ms / 50 ms gives 18 frames at 200 Hz).
Template make_template(WindowView signal, const WindowSpec& rms_spec, std::string source_id = {});

struct WakeModel {
  std::vector<Template> templates;
  /// Unset until calibration has run.
  std::optional<double> threshold;
  std::optional<double> s;
  std::size_t vote_length = 5;
  std::size_t vote_quorum = 3;

  /// Throws ConfigError when an invariant is broken.
  void validate() const;
};

/// Unconstrained DTW with the symmetric (up, left, diagonal) step pattern and
/// Euclidean frame cost. Returns the raw accumulated cost of the best path
/// from (0,0) to (Ta-1,Tb-1).
double dtw_distance(const Template& a, const Template& b);

/// DTW over every unordered template pair (i<j) in lexicographic order.
std::vector<double> pairwise_distances(std::span<const Template> templates);

/// mean(D) + s * stddev(D), population normalization.
double compute_threshold(std::span<const double> distances, double s);

/// Average DTW distance from `candidate` to each template. Lower is more
/// snap-like.
double score(const Template& candidate, std::span<const Template> templates);
double score(const Template& candidate, const WakeModel& model);

/// Sliding majority vote over the last `length` below-threshold decisions.
/// Fires when at least `quorum` are true, then clears its buffer.
class VoteState {
 public:
  explicit VoteState(std::size_t length = 5, std::size_t quorum = 3);

  /// Returns true when this decision completes a detection.
  bool step(bool below_threshold);
  void reset();
  std::size_t buffered() const { return buffer_.size(); }

 private:
  std::size_t length_;
  std::size_t quorum_;
  std::deque<bool> buffer_;
  std::size_t true_count_ = 0;
};

}  // namespace snapgate
