#include "feast/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "feast/error.hpp"

namespace feast {

void FeastParams::validate() const {
  if (!(delta_inc > 0.0)) throw ParameterError("delta_inc must be positive");
  if (!(delta_dec > 0.0)) throw ParameterError("delta_dec must be positive");
  if (!(eta > 0.0 && eta < 1.0)) throw ParameterError("eta must lie in (0, 1)");
  if (n_features < 1) throw ParameterError("n_features must be at least 1");
  if (roi_w <= 0 || roi_w % 2 == 0) throw ParameterError("roi_w must be odd and positive");
  if (!(init_threshold_max >= 0.0 && init_threshold_max <= kMaxThreshold)) {
    throw ParameterError("init_threshold_max must lie in [0, 2]");
  }
}

namespace {

double dot(const double* a, const double* b, std::size_t n) noexcept {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

void normalize(std::span<double> v) {
  const double n = std::sqrt(dot(v.data(), v.data(), v.size()));
  if (!(n > 0.0) || !std::isfinite(n)) throw InvariantError("cannot normalise a zero vector");
  for (auto& x : v) x /= n;
}

// Leaves rows that are already unit untouched so persisted weights reload
// bit-exactly.
void normalize_if_needed(std::span<double> v) {
  const double sq = dot(v.data(), v.data(), v.size());
  if (std::abs(sq - 1.0) > 1e-12) normalize(v);
}

double to_distance(double similarity) noexcept {
  return std::clamp(1.0 - similarity, 0.0, kMaxThreshold);
}

}  // namespace

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeMismatchError("cosine_distance: length mismatch");
  return to_distance(dot(a.data(), b.data(), a.size()));
}

FeastNetwork::FeastNetwork(FeastParams params, std::vector<double> weights,
                           std::vector<double> thresholds)
    : params_(params),
      dim_(params.dim()),
      weights_(std::move(weights)),
      thresholds_(std::move(thresholds)),
      wins_(params.n_features, 0) {
  params_.validate();
  if (weights_.size() != params_.n_features * dim_) {
    throw ShapeMismatchError("weights: expected " + std::to_string(params_.n_features * dim_) +
                             " values, got " + std::to_string(weights_.size()));
  }
  if (thresholds_.size() != params_.n_features) {
    throw ShapeMismatchError("thresholds: expected " + std::to_string(params_.n_features) +
                             " values");
  }
  for (std::size_t i = 0; i < params_.n_features; ++i) {
    normalize_if_needed(std::span<double>(weights_).subspan(i * dim_, dim_));
    thresholds_[i] = std::clamp(thresholds_[i], 0.0, kMaxThreshold);
  }
}

void FeastNetwork::check_dim(std::span<const double> d) const {
  if (d.size() != dim_) {
    throw ShapeMismatchError("descriptor length " + std::to_string(d.size()) +
                             " does not match feature length " + std::to_string(dim_));
  }
}

double FeastNetwork::distance_to(std::size_t i, std::span<const double> d) const noexcept {
  return to_distance(dot(weights_.data() + i * dim_, d.data(), dim_));
}

MatchResult FeastNetwork::match(std::span<const double> d) const {
  check_dim(d);
  MatchResult best = MatchResult::miss();
  for (std::size_t i = 0; i < params_.n_features; ++i) {
    const double dist = distance_to(i, d);
    if (dist <= thresholds_[i] && (!best.win || dist < best.distance)) {
      best = MatchResult::won(i, dist);
    }
  }
  return best;
}

MatchResult FeastNetwork::train_step(std::span<const double> d) {
  const MatchResult m = match(d);
  if (m.win) {
    auto w = std::span<double>(weights_).subspan(m.feature * dim_, dim_);
    const double keep = 1.0 - params_.eta;
    for (std::size_t k = 0; k < dim_; ++k) w[k] = keep * w[k] + params_.eta * d[k];
    normalize(w);
    thresholds_[m.feature] = std::max(0.0, thresholds_[m.feature] - params_.delta_dec);
    ++wins_[m.feature];
  } else {
    for (auto& t : thresholds_) t = std::min(kMaxThreshold, t + params_.delta_inc);
  }
  return m;
}

MatchResult FeastNetwork::nearest_match(std::span<const double> d) const {
  check_dim(d);
  MatchResult best = MatchResult::won(0, distance_to(0, d));
  for (std::size_t i = 1; i < params_.n_features; ++i) {
    const double dist = distance_to(i, d);
    if (dist < best.distance) best = MatchResult::won(i, dist);
  }
  return best;
}

std::size_t FeastNetwork::nearest(std::span<const double> d) const {
  return nearest_match(d).feature;
}

void FeastNetwork::set_threshold(std::size_t i, double value) {
  if (i >= size()) throw OutOfRangeError("feature index out of range");
  thresholds_.at(i) = std::clamp(value, 0.0, kMaxThreshold);
}

void FeastNetwork::set_weights(std::size_t i, std::span<const double> w) {
  if (i >= size()) throw OutOfRangeError("feature index out of range");
  check_dim(w);
  auto row = std::span<double>(weights_).subspan(i * dim_, dim_);
  std::copy(w.begin(), w.end(), row.begin());
  normalize(row);
}

void FeastNetwork::reset_win_counts() { std::fill(wins_.begin(), wins_.end(), 0); }

FeastNetwork init_network(const FeastParams& params, std::uint64_t seed) {
  params.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> weights(params.n_features * params.dim());
  for (auto& w : weights) w = gauss(rng);
  std::vector<double> thresholds(params.n_features);
  for (auto& t : thresholds) t = params.init_threshold_max * unit(rng);
  return FeastNetwork(params, std::move(weights), std::move(thresholds));
}

}  // namespace feast
