#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "snapgate/signal.hpp"

namespace snapgate {

/// WristFlexion, WristExtension, HandOpen, HandClose, NoMovement.
const std::vector<std::string>& default_class_labels();
inline constexpr const char* kRestLabel = "NoMovement";

enum class PriorMode { Empirical, Uniform };

struct LdaOptions {
  /// Shrinkage toward the diagonal of the pooled covariance.
  double regularization = 1e-3;
  PriorMode priors = PriorMode::Empirical;
};

/// Shared-covariance Gaussian classifier. Immutable once built; prediction is
/// safe from several threads.
///
/// Scores are delta_k(x) = x' S^-1 mu_k - 0.5 mu_k' S^-1 mu_k + log pi_k, with
/// the linear weights cached at construction.
class LdaModel {
 public:
  LdaModel(std::vector<std::string> class_labels, Eigen::MatrixXd class_means,
           Eigen::MatrixXd covariance_inverse, Eigen::VectorXd log_priors, double regularization);

  std::size_t classes() const { return class_labels_.size(); }
  std::size_t dimensions() const { return static_cast<std::size_t>(class_means_.cols()); }
  const std::vector<std::string>& class_labels() const { return class_labels_; }
  const Eigen::MatrixXd& class_means() const { return class_means_; }
  const Eigen::MatrixXd& covariance_inverse() const { return covariance_inverse_; }
  const Eigen::VectorXd& log_priors() const { return log_priors_; }
  /// The shrinkage actually applied, after any escalation.
  double regularization() const { return regularization_; }

  /// Index of `label`, or classes() when absent.
  std::size_t class_index(const std::string& label) const;

  Eigen::VectorXd discriminants(std::span<const double> x) const;
  /// argmax of the discriminants, lowest index on ties.
  std::size_t predict(std::span<const double> x) const;
  /// Softmax of the discriminants.
  Eigen::VectorXd posterior(std::span<const double> x) const;

 private:
  std::vector<std::string> class_labels_;
  Eigen::MatrixXd class_means_;
  Eigen::MatrixXd covariance_inverse_;
  Eigen::VectorXd log_priors_;
  double regularization_;
  Eigen::MatrixXd weights_;  // K x d
  Eigen::VectorXd bias_;     // K
};

/// Fits class means, pooled within-class covariance and priors. `labels` are
/// indices into `class_labels`; each class needs at least two rows.
///
/// The covariance used is (1 - l) S + l diag(S). When that is not
/// numerically positive definite, l is escalated (1e-6, then x10 up to 1)
/// and a warning is logged.
LdaModel fit_lda(const Eigen::MatrixXd& features, std::span<const int> labels,
                 std::vector<std::string> class_labels, const LdaOptions& options = {});

/// Channel-mean MAV levels used to scale each command's speed.
struct SpeedCalibration {
  std::size_t rest_class = 0;
  double rest_mav = 0.0;
  std::vector<double> active_mav;  // per class; entry for rest_class is unused
};

/// Averages the channel-mean MAV of the training windows per class.
/// Throws FitError when a non-rest class is not above the rest level.
SpeedCalibration fit_speed_calibration(std::span<const double> window_mean_mav,
                                       std::span<const int> labels, std::size_t classes,
                                       std::size_t rest_class);

/// clamp((meanMAV - rest) / (active[class] - rest), 0, 1); rest class -> 0.
double proportional_speed(WindowView window, const SpeedCalibration& cal,
                          std::size_t predicted_class);

}  // namespace snapgate
