#include "snapgate/lda.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "snapgate/error.hpp"
#include "snapgate/features.hpp"
#include "snapgate/log.hpp"

namespace snapgate {
namespace {

// Reciprocal condition number below which the shrunk covariance is treated
// as singular.
constexpr double kMinRcond = 1e-13;

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> x) {
  return {x.data(), static_cast<Eigen::Index>(x.size())};
}

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

}  // namespace

const std::vector<std::string>& default_class_labels() {
  static const std::vector<std::string> labels{"WristFlexion", "WristExtension", "HandOpen",
                                               "HandClose", kRestLabel};
  return labels;
}

LdaModel::LdaModel(std::vector<std::string> class_labels, Eigen::MatrixXd class_means,
                   Eigen::MatrixXd covariance_inverse, Eigen::VectorXd log_priors,
                   double regularization)
    : class_labels_(std::move(class_labels)),
      class_means_(std::move(class_means)),
      covariance_inverse_(std::move(covariance_inverse)),
      log_priors_(std::move(log_priors)),
      regularization_(regularization) {
  const auto k = static_cast<Eigen::Index>(class_labels_.size());
  if (k < 2) throw FitError("LDA needs at least two classes");
  if (class_means_.rows() != k || log_priors_.size() != k) {
    throw DimensionError("LDA means/priors do not match the class count");
  }
  const auto d = class_means_.cols();
  if (d < 1 || covariance_inverse_.rows() != d || covariance_inverse_.cols() != d) {
    throw DimensionError("LDA covariance inverse does not match the feature dimension");
  }
  if (!all_finite(class_means_) || !all_finite(covariance_inverse_) ||
      !log_priors_.allFinite()) {
    throw FitError("LDA parameters must be finite");
  }
  weights_ = class_means_ * covariance_inverse_;
  bias_.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    bias_(i) = -0.5 * weights_.row(i).dot(class_means_.row(i)) + log_priors_(i);
  }
}

std::size_t LdaModel::class_index(const std::string& label) const {
  const auto it = std::find(class_labels_.begin(), class_labels_.end(), label);
  return static_cast<std::size_t>(it - class_labels_.begin());
}

Eigen::VectorXd LdaModel::discriminants(std::span<const double> x) const {
  if (x.size() != dimensions()) {
    throw DimensionError("feature vector has " + std::to_string(x.size()) +
                         " values, model expects " + std::to_string(dimensions()));
  }
  return weights_ * as_vector(x) + bias_;
}

std::size_t LdaModel::predict(std::span<const double> x) const {
  const Eigen::VectorXd scores = discriminants(x);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores(i) > scores(best)) best = i;
  }
  return static_cast<std::size_t>(best);
}

Eigen::VectorXd LdaModel::posterior(std::span<const double> x) const {
  Eigen::VectorXd scores = discriminants(x);
  scores.array() -= scores.maxCoeff();
  scores = scores.array().exp().matrix();
  return scores / scores.sum();
}

LdaModel fit_lda(const Eigen::MatrixXd& features, std::span<const int> labels,
                 std::vector<std::string> class_labels, const LdaOptions& options) {
  const auto n = features.rows();
  const auto d = features.cols();
  const auto k = static_cast<Eigen::Index>(class_labels.size());
  if (d < 1) throw FitError("LDA needs at least one feature");
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw DimensionError("label count does not match feature rows");
  }
  if (!(options.regularization >= 0.0 && options.regularization <= 1.0)) {
    throw std::invalid_argument("regularization must lie in [0, 1]");
  }
  if (!features.allFinite()) throw FitError("training features must be finite");

  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(k, d);
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= k) throw FitError("label index out of range");
    means.row(y) += features.row(i);
    ++counts[static_cast<std::size_t>(y)];
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] < 2) {
      throw FitError("class '" + class_labels[static_cast<std::size_t>(c)] +
                     "' has fewer than two training samples");
    }
    means.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
  }

  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::RowVectorXd centered = features.row(i) - means.row(labels[static_cast<std::size_t>(i)]);
    scatter.noalias() += centered.transpose() * centered;
  }
  const Eigen::MatrixXd pooled = scatter / static_cast<double>(n - k);

  // Zero-variance features would leave the shrinkage target singular, so the
  // target diagonal is floored relative to the average variance.
  const double mean_variance = pooled.diagonal().mean();
  const double floor = mean_variance > 0.0 ? 1e-6 * mean_variance : 1.0;
  const Eigen::VectorXd target = pooled.diagonal().cwiseMax(floor);

  double lambda = options.regularization;
  Eigen::MatrixXd inverse;
  for (;;) {
    Eigen::MatrixXd shrunk = (1.0 - lambda) * pooled;
    shrunk.diagonal() += lambda * target;
    const Eigen::LLT<Eigen::MatrixXd> llt(shrunk);
    if (llt.info() == Eigen::Success && llt.rcond() > kMinRcond) {
      inverse = llt.solve(Eigen::MatrixXd::Identity(d, d));
      inverse = 0.5 * (inverse + inverse.transpose());
      break;
    }
    if (lambda >= 1.0) throw FitError("pooled covariance could not be regularized");
    const double next = lambda == 0.0 ? 1e-6 : std::min(1.0, lambda * 10.0);
    log_warn("pooled covariance is singular at regularization " + std::to_string(lambda) +
             "; escalating to " + std::to_string(next));
    lambda = next;
  }

  Eigen::VectorXd log_priors(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    log_priors(c) = options.priors == PriorMode::Uniform
                        ? -std::log(static_cast<double>(k))
                        : std::log(static_cast<double>(counts[static_cast<std::size_t>(c)]) /
                                   static_cast<double>(n));
  }
  return LdaModel(std::move(class_labels), std::move(means), std::move(inverse),
                  std::move(log_priors), lambda);
}

SpeedCalibration fit_speed_calibration(std::span<const double> window_mean_mav,
                                       std::span<const int> labels, std::size_t classes,
                                       std::size_t rest_class) {
  if (window_mean_mav.size() != labels.size()) {
    throw DimensionError("MAV count does not match label count");
  }
  if (rest_class >= classes) throw FitError("rest class index out of range");
  std::vector<double> sums(classes, 0.0);
  std::vector<std::size_t> counts(classes, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto y = static_cast<std::size_t>(labels[i]);
    if (labels[i] < 0 || y >= classes) throw FitError("label index out of range");
    sums[y] += window_mean_mav[i];
    ++counts[y];
  }
  SpeedCalibration cal;
  cal.rest_class = rest_class;
  cal.active_mav.resize(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    if (counts[c] == 0) throw FitError("class " + std::to_string(c) + " has no training windows");
    cal.active_mav[c] = sums[c] / static_cast<double>(counts[c]);
  }
  cal.rest_mav = cal.active_mav[rest_class];
  for (std::size_t c = 0; c < classes; ++c) {
    if (c != rest_class && !(cal.active_mav[c] > cal.rest_mav)) {
      throw FitError("class " + std::to_string(c) +
                     " training MAV is not above the rest level; cannot scale speed");
    }
  }
  return cal;
}

double proportional_speed(WindowView window, const SpeedCalibration& cal,
                          std::size_t predicted_class) {
  if (predicted_class >= cal.active_mav.size()) {
    throw std::out_of_range("predicted class outside speed calibration");
  }
  if (predicted_class == cal.rest_class) return 0.0;
  const double level = features::mean_mav(window);
  const double speed =
      (level - cal.rest_mav) / (cal.active_mav[predicted_class] - cal.rest_mav);
  return std::clamp(speed, 0.0, 1.0);
}

}  // namespace snapgate
