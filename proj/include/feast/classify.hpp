#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "feast/extractor.hpp"

namespace feast {

/// Feature-event counts over one tumbling window of a recording.
struct PooledVector {
  std::vector<std::uint32_t> counts;  // layout order, ON then OFF
  int label = -1;
  std::size_t recording = 0;
  std::size_t window = 0;
};

/// Tumbling windows [t_begin + k w, t_begin + (k+1) w) covering
/// [t_begin, t_end). Empty windows are emitted with zero counts; events at
/// or past t_end land in the last window, so counts are conserved.
std::vector<PooledVector> pool_window(std::span<const FeatureEvent> events,
                                      const FeatureLayout& layout, Timestamp window_us,
                                      Timestamp t_begin, Timestamp t_end, int label = -1,
                                      std::size_t recording = 0);

/// Counts per (feature, time bin), feature-major.
struct TimeBinMatrix {
  std::size_t n_features = 0;
  std::size_t n_bins = 0;
  Timestamp bin_us = 1000;
  std::vector<std::uint32_t> counts;

  std::uint32_t at(std::size_t feature, std::size_t bin) const {
    return counts[feature * n_bins + bin];
  }
  std::uint64_t total() const noexcept;
};

/// Events past the last bin are clipped into it.
TimeBinMatrix time_bin_matrix(std::span<const FeatureEvent> events, const FeatureLayout& layout,
                              Timestamp bin_us, std::size_t n_bins);

/// Per-column z-scoring followed by a global gain so that the mean squared
/// norm of the training rows is 1.
struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd inv_std;
  double gain = 1.0;

  static Standardizer fit(const Eigen::MatrixXd& X, bool center = true);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

/// One-vs-all ridge regression against +-1 targets, bias column appended.
struct LinearModel {
  Eigen::MatrixXd weights;  // (dim + 1) x classes
  int n_classes = 0;

  Eigen::VectorXd scores(std::span<const double> x) const;
};

LinearModel linear_train(const Eigen::MatrixXd& X, std::span<const int> y, int n_classes,
                         double lambda = 1e-3);
int linear_predict(const LinearModel& model, std::span<const double> x);

/// Extreme learning machine: frozen random sigmoid hidden layer, linear
/// read-out trained by recursive least squares (online pseudo-inverse).
/// After t updates the read-out equals the ridge solution
/// (H^T H + lambda I)^-1 H^T T over the samples seen so far.
class ElmModel {
 public:
  ElmModel(std::size_t input_dim, std::size_t hidden, int classes, std::uint64_t seed,
           double lambda = 1e-3);

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(input_weights_.cols()); }
  std::size_t hidden() const noexcept { return static_cast<std::size_t>(input_weights_.rows()); }
  int classes() const noexcept { return classes_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double lambda() const noexcept { return lambda_; }

  /// sigmoid(W x + b); zero inputs are skipped, so sparse inputs are cheap.
  Eigen::VectorXd hidden_activation(std::span<const double> x) const;

  /// Rank-1 recursive update with the +-1 target of `label`.
  void update(std::span<const double> x, int label);
  void update_hidden(const Eigen::VectorXd& h, int label);

  Eigen::VectorXd scores(std::span<const double> x) const;
  int predict(std::span<const double> x) const;

  const Eigen::MatrixXf& input_weights() const noexcept { return input_weights_; }
  const Eigen::VectorXf& hidden_bias() const noexcept { return bias_; }
  const Eigen::MatrixXd& output_weights() const noexcept { return beta_; }
  const Eigen::MatrixXd& inverse_correlation() const noexcept { return P_; }

  /// Restores a persisted read-out (state from save).
  void set_state(Eigen::MatrixXd beta, Eigen::MatrixXd P);

 private:
  Eigen::MatrixXf input_weights_;  // hidden x input, column j = fan-out of input j
  Eigen::VectorXf bias_;
  Eigen::MatrixXd beta_;  // hidden x classes
  Eigen::MatrixXd P_;     // hidden x hidden
  int classes_;
  std::uint64_t seed_;
  double lambda_;
};

ElmModel elm_init(std::size_t input_dim, std::size_t hidden, int classes, std::uint64_t seed,
                  double lambda = 1e-3);
void elm_update(ElmModel& model, std::span<const double> x, int label);
int elm_predict(const ElmModel& model, std::span<const double> x);

/// Index of the largest entry; ties go to the lowest index.
int argmax(const Eigen::VectorXd& v);

/// Modal class; ties go to the lowest class id. Throws on an empty input.
int majority_vote(std::span<const int> predictions);

struct Evaluation {
  double accuracy = 0.0;
  int n_classes = 0;
  std::vector<std::vector<std::uint64_t>> confusion;  // [actual][predicted]
  std::vector<double> precision;  // 0 for a class never predicted
  std::vector<double> recall;     // 0 for a class never present
};

Evaluation evaluate(std::span<const int> predictions, std::span<const int> labels, int n_classes);

}  // namespace feast
