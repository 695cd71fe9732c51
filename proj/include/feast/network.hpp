#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace feast {

struct FeastParams {
  double delta_inc = 0.003;  // threshold expansion on a miss (all features)
  double delta_dec = 0.001;  // threshold contraction on a win (winner only)
  double eta = 0.001;        // mixing rate of the winner's weights
  std::size_t n_features = 25;
  int roi_w = 11;
  // Initial thresholds are drawn from U[0, init_threshold_max].
  double init_threshold_max = 1.0;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(roi_w) * roi_w; }
  void validate() const;
};

inline constexpr double kMaxThreshold = 2.0;

struct MatchResult {
  bool win = false;
  std::size_t feature = 0;
  double distance = 0.0;

  static MatchResult miss() noexcept { return {}; }
  static MatchResult won(std::size_t i, double d) noexcept { return {true, i, d}; }
  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

/// 1 - a.b for unit vectors, clamped to [0, 2].
double cosine_distance(std::span<const double> a, std::span<const double> b);

/// A set of features, each a unit-norm weight vector with its own
/// selection threshold (a cosine-distance radius in [0, 2]).
class FeastNetwork {
 public:
  /// Takes ownership of `weights` (n_features x dim, row-major; rows are
  /// normalised) and `thresholds` (clamped to [0, 2]).
  FeastNetwork(FeastParams params, std::vector<double> weights, std::vector<double> thresholds);

  std::size_t size() const noexcept { return params_.n_features; }
  std::size_t dim() const noexcept { return dim_; }
  const FeastParams& params() const noexcept { return params_; }

  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> weights(std::size_t i) const noexcept {
    return std::span<const double>(weights_).subspan(i * dim_, dim_);
  }
  std::span<const double> thresholds() const noexcept { return thresholds_; }
  double threshold(std::size_t i) const noexcept { return thresholds_[i]; }
  std::span<const std::uint64_t> win_counts() const noexcept { return wins_; }

  /// Nearest feature among those whose threshold admits `d`; ties go to the
  /// lowest index. Miss when none qualifies.
  MatchResult match(std::span<const double> d) const;

  /// One online learning step. On a win the winner's weights move toward d
  /// by eta (then renormalise), its threshold shrinks by delta_dec and its
  /// win count increments. On a miss every threshold grows by delta_inc.
  MatchResult train_step(std::span<const double> d);

  /// Globally nearest feature, thresholds ignored.
  std::size_t nearest(std::span<const double> d) const;
  /// nearest() plus its distance.
  MatchResult nearest_match(std::span<const double> d) const;

  void set_threshold(std::size_t i, double value);
  void set_weights(std::size_t i, std::span<const double> w);
  void reset_win_counts();

 private:
  void check_dim(std::span<const double> d) const;
  double distance_to(std::size_t i, std::span<const double> d) const noexcept;

  FeastParams params_;
  std::size_t dim_;
  std::vector<double> weights_;
  std::vector<double> thresholds_;
  std::vector<std::uint64_t> wins_;
};

/// Weights i.i.d. Gaussian then normalised; thresholds U[0, init_threshold_max].
FeastNetwork init_network(const FeastParams& params, std::uint64_t seed);

}  // namespace feast
