#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "feast/network.hpp"

namespace feast {

inline constexpr std::size_t kDefaultMonitorPeriod = 100;

/// The four convergence signals over one sampling window.
struct MonitorSample {
  std::uint64_t event_index = 0;  // input events seen when the sample was taken
  double d_weights = 0.0;         // Frobenius norm of the weight change
  double d_thresholds = 0.0;      // L2 norm of the threshold change
  double missed_rate = 0.0;       // misses / events in the window
  double spike_rate_std = 0.0;    // population std of per-feature window wins

  friend bool operator==(const MonitorSample&, const MonitorSample&) = default;
};

struct MonitorLog {
  std::size_t period = kDefaultMonitorPeriod;
  std::vector<MonitorSample> samples;
};

/// Copy of the adaptive state of a network at one instant.
struct NetworkSnapshot {
  std::vector<double> weights;
  std::vector<double> thresholds;

  static NetworkSnapshot of(const FeastNetwork& net);
};

/// Throws ShapeMismatchError when the snapshot, network and win counts
/// disagree in size, ParameterError when period is 0.
MonitorSample sample_signals(const NetworkSnapshot& previous, const FeastNetwork& current,
                             std::span<const std::uint64_t> window_wins,
                             std::uint64_t window_misses, std::size_t period,
                             std::uint64_t event_index);

/// Accumulates window statistics during training and emits a sample every
/// `period` events.
class MonitorRecorder {
 public:
  MonitorRecorder(const FeastNetwork& net, std::size_t period = kDefaultMonitorPeriod);

  /// Call after every train_step on `net`.
  void record(const MatchResult& m, const FeastNetwork& net);

  const MonitorLog& log() const noexcept { return log_; }
  std::uint64_t events() const noexcept { return events_; }
  std::uint64_t misses() const noexcept { return misses_; }

 private:
  MonitorLog log_;
  NetworkSnapshot snapshot_;
  std::vector<std::uint64_t> window_wins_;
  std::uint64_t window_misses_ = 0;
  std::uint64_t events_ = 0;
  std::uint64_t misses_ = 0;
};

/// Gini coefficient as the normalised double sum over all ordered pairs:
///   G = sum_i sum_j |x_i - x_j| / (2 n sum_j x_j).
/// Throws UndefinedInputError when every count is zero (or none is given),
/// ParameterError on negative or non-finite counts.
double gini(std::span<const double> counts);
double gini(std::span<const std::uint64_t> counts);

struct ConvergencePoint {
  std::size_t sample = 0;  // 1-based ordinal of the sample where the plateau is confirmed
  std::uint64_t event_index = 0;
};

/// Plateau detector over d_weights, d_thresholds and missed_rate. A window
/// of `window_k` consecutive samples is stable for a signal when the means of
/// its two halves differ by less than `epsilon_rel` times the window mean
/// (an all-zero window is stable). Returns the first sample that completes a
/// window stable in all three signals, or nullopt.
std::optional<ConvergencePoint> detect_convergence(const MonitorLog& log,
                                                   std::size_t window_k = 50,
                                                   double epsilon_rel = 0.1);

}  // namespace feast
