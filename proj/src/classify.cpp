#include "feast/classify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "feast/error.hpp"

namespace feast {

std::vector<PooledVector> pool_window(std::span<const FeatureEvent> events,
                                      const FeatureLayout& layout, Timestamp window_us,
                                      Timestamp t_begin, Timestamp t_end, int label,
                                      std::size_t recording) {
  if (window_us <= 0) throw ParameterError("pooling window must be positive");
  const Timestamp span = std::max<Timestamp>(t_end - t_begin, 0);
  std::size_t n = static_cast<std::size_t>((span + window_us - 1) / window_us);
  if (n == 0 && !events.empty()) n = 1;
  std::vector<PooledVector> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k].counts.assign(layout.total(), 0);
    out[k].label = label;
    out[k].recording = recording;
    out[k].window = k;
  }
  for (const auto& e : events) {
    const Timestamp rel = std::max<Timestamp>(e.t - t_begin, 0);
    const std::size_t k = std::min(static_cast<std::size_t>(rel / window_us), n - 1);
    const std::size_t f = layout.index(e);
    if (f >= layout.total()) throw OutOfRangeError("feature event outside the layout");
    ++out[k].counts[f];
  }
  return out;
}

std::uint64_t TimeBinMatrix::total() const noexcept {
  std::uint64_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

TimeBinMatrix time_bin_matrix(std::span<const FeatureEvent> events, const FeatureLayout& layout,
                              Timestamp bin_us, std::size_t n_bins) {
  if (bin_us <= 0 || n_bins == 0) throw ParameterError("time bins must be non-empty");
  TimeBinMatrix m;
  m.n_features = layout.total();
  m.n_bins = n_bins;
  m.bin_us = bin_us;
  m.counts.assign(m.n_features * n_bins, 0);
  for (const auto& e : events) {
    const std::size_t f = layout.index(e);
    if (f >= m.n_features) throw OutOfRangeError("feature event outside the layout");
    const std::size_t b =
        std::min(static_cast<std::size_t>(std::max<Timestamp>(e.t, 0) / bin_us), n_bins - 1);
    ++m.counts[f * n_bins + b];
  }
  return m;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& X, bool center) {
  Standardizer s;
  const auto n = static_cast<double>(std::max<Eigen::Index>(X.rows(), 1));
  s.mean = center ? Eigen::RowVectorXd(X.colwise().mean())
                  : Eigen::RowVectorXd::Zero(X.cols());
  s.inv_std.resize(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double var = center ? (X.col(j).array() - s.mean(j)).square().sum() / n : 1.0;
    s.inv_std(j) = var > 1e-24 ? 1.0 / std::sqrt(var) : 1.0;
  }
  const Eigen::MatrixXd Z = s.apply(X);
  const double ms = X.rows() > 0 ? Z.rowwise().squaredNorm().mean() : 0.0;
  s.gain = ms > 0.0 ? 1.0 / std::sqrt(ms) : 1.0;
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
  if (X.cols() != mean.cols()) throw ShapeMismatchError("standardizer: column count differs");
  Eigen::MatrixXd Z = (X.rowwise() - mean).array().rowwise() * inv_std.array();
  return Z * gain;
}

int argmax(const Eigen::VectorXd& v) {
  int best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = static_cast<int>(i);
  }
  return best;
}

namespace {

Eigen::MatrixXd targets(std::span<const int> y, int n_classes) {
  Eigen::MatrixXd T = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(y.size()), n_classes, -1.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0 || y[i] >= n_classes) {
      throw OutOfRangeError("label " + std::to_string(y[i]) + " outside [0, " +
                            std::to_string(n_classes) + ")");
    }
    T(static_cast<Eigen::Index>(i), y[i]) = 1.0;
  }
  return T;
}

void check_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) throw ParameterError("classifier input is not finite");
  }
}

}  // namespace

LinearModel linear_train(const Eigen::MatrixXd& X, std::span<const int> y, int n_classes,
                         double lambda) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) {
    throw ShapeMismatchError("linear_train: sample and label counts differ");
  }
  if (n_classes < 1) throw ParameterError("linear_train: need at least one class");
  if (!(lambda > 0.0)) throw ParameterError("linear_train: ridge lambda must be positive");
  const Eigen::Index n = X.rows(), d = X.cols() + 1;
  Eigen::MatrixXd A(n, d);
  A.leftCols(X.cols()) = X;
  A.col(X.cols()).setOnes();
  const Eigen::MatrixXd T = targets(y, n_classes);

  LinearModel m;
  m.n_classes = n_classes;
  if (d <= n) {
    Eigen::MatrixXd G = A.transpose() * A;
    G.diagonal().array() += lambda;
    m.weights = G.ldlt().solve(A.transpose() * T);
  } else {
    Eigen::MatrixXd G = A * A.transpose();
    G.diagonal().array() += lambda;
    m.weights = A.transpose() * G.ldlt().solve(T);
  }
  return m;
}

Eigen::VectorXd LinearModel::scores(std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) + 1 != weights.rows()) {
    throw ShapeMismatchError("linear model: input dimension differs");
  }
  check_finite(x);
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  return weights.topRows(weights.rows() - 1).transpose() * v +
         weights.row(weights.rows() - 1).transpose();
}

int linear_predict(const LinearModel& model, std::span<const double> x) {
  return argmax(model.scores(x));
}

ElmModel::ElmModel(std::size_t input_dim, std::size_t hidden, int classes, std::uint64_t seed,
                   double lambda)
    : classes_(classes), seed_(seed), lambda_(lambda) {
  if (hidden < 1) throw ParameterError("ELM needs at least one hidden unit");
  if (input_dim < 1) throw ParameterError("ELM needs a non-empty input");
  if (classes < 1) throw ParameterError("ELM needs at least one class");
  if (!(lambda > 0.0)) throw ParameterError("ELM ridge lambda must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  const auto H = static_cast<Eigen::Index>(hidden);
  input_weights_.resize(H, static_cast<Eigen::Index>(input_dim));
  for (Eigen::Index j = 0; j < input_weights_.cols(); ++j) {
    for (Eigen::Index i = 0; i < H; ++i) input_weights_(i, j) = u(rng);
  }
  bias_.resize(H);
  for (Eigen::Index i = 0; i < H; ++i) bias_(i) = u(rng);
  beta_ = Eigen::MatrixXd::Zero(H, classes);
  P_ = Eigen::MatrixXd::Identity(H, H) / lambda;
}

Eigen::VectorXd ElmModel::hidden_activation(std::span<const double> x) const {
  if (x.size() != input_dim()) throw ShapeMismatchError("ELM: input dimension differs");
  check_finite(x);
  Eigen::VectorXd z = bias_.cast<double>();
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] == 0.0) continue;
    z += x[j] * input_weights_.col(static_cast<Eigen::Index>(j)).cast<double>();
  }
  return (1.0 + (-z.array()).exp()).inverse().matrix();
}

void ElmModel::update_hidden(const Eigen::VectorXd& h, int label) {
  if (label < 0 || label >= classes_) throw OutOfRangeError("ELM: label out of range");
  Eigen::VectorXd t = Eigen::VectorXd::Constant(classes_, -1.0);
  t(label) = 1.0;
  const Eigen::VectorXd Ph = P_ * h;
  const double denom = 1.0 + h.dot(Ph);
  const Eigen::VectorXd k = Ph / denom;
  const Eigen::VectorXd err = t - beta_.transpose() * h;
  beta_.noalias() += k * err.transpose();
  P_.noalias() -= k * Ph.transpose();
}

void ElmModel::update(std::span<const double> x, int label) {
  update_hidden(hidden_activation(x), label);
}

Eigen::VectorXd ElmModel::scores(std::span<const double> x) const {
  return beta_.transpose() * hidden_activation(x);
}

int ElmModel::predict(std::span<const double> x) const { return argmax(scores(x)); }

void ElmModel::set_state(Eigen::MatrixXd beta, Eigen::MatrixXd P) {
  if (beta.rows() != beta_.rows() || beta.cols() != beta_.cols() || P.rows() != P_.rows() ||
      P.cols() != P_.cols()) {
    throw ShapeMismatchError("ELM: persisted state has the wrong shape");
  }
  beta_ = std::move(beta);
  P_ = std::move(P);
}

ElmModel elm_init(std::size_t input_dim, std::size_t hidden, int classes, std::uint64_t seed,
                  double lambda) {
  return ElmModel(input_dim, hidden, classes, seed, lambda);
}

void elm_update(ElmModel& model, std::span<const double> x, int label) { model.update(x, label); }

int elm_predict(const ElmModel& model, std::span<const double> x) { return model.predict(x); }

int majority_vote(std::span<const int> predictions) {
  if (predictions.empty()) throw ParameterError("majority_vote: no predictions");
  const int hi = *std::max_element(predictions.begin(), predictions.end());
  const int lo = *std::min_element(predictions.begin(), predictions.end());
  if (lo < 0) throw OutOfRangeError("majority_vote: negative class id");
  std::vector<std::size_t> votes(static_cast<std::size_t>(hi) + 1, 0);
  for (int p : predictions) ++votes[static_cast<std::size_t>(p)];
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

Evaluation evaluate(std::span<const int> predictions, std::span<const int> labels,
                    int n_classes) {
  if (predictions.size() != labels.size()) {
    throw ShapeMismatchError("evaluate: prediction and label counts differ");
  }
  if (n_classes < 1) throw ParameterError("evaluate: need at least one class");
  Evaluation ev;
  ev.n_classes = n_classes;
  const auto K = static_cast<std::size_t>(n_classes);
  ev.confusion.assign(K, std::vector<std::uint64_t>(K, 0));
  std::uint64_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int a = labels[i], p = predictions[i];
    if (a < 0 || a >= n_classes || p < 0 || p >= n_classes) {
      throw OutOfRangeError("evaluate: label out of range at index " + std::to_string(i));
    }
    ++ev.confusion[std::size_t(a)][std::size_t(p)];
    if (a == p) ++correct;
  }
  ev.accuracy = labels.empty() ? 0.0 : double(correct) / double(labels.size());
  ev.precision.assign(K, 0.0);
  ev.recall.assign(K, 0.0);
  for (std::size_t c = 0; c < K; ++c) {
    std::uint64_t row = 0, col = 0;
    for (std::size_t j = 0; j < K; ++j) {
      row += ev.confusion[c][j];
      col += ev.confusion[j][c];
    }
    if (col > 0) ev.precision[c] = double(ev.confusion[c][c]) / double(col);
    if (row > 0) ev.recall[c] = double(ev.confusion[c][c]) / double(row);
  }
  return ev;
}

}  // namespace feast
