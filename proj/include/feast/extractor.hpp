#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "feast/events.hpp"
#include "feast/monitor.hpp"
#include "feast/network.hpp"
#include "feast/surface.hpp"

namespace feast {

/// Output event of a feature network: the index of the matched feature and
/// the unchanged timestamp of the triggering input event.
struct FeatureEvent {
  std::uint32_t feature = 0;
  Timestamp t = 0;
  Channel channel = Channel::On;

  friend bool operator==(const FeatureEvent&, const FeatureEvent&) = default;
};

/// Maps (channel, feature) to a flat index with ON features first, then OFF.
struct FeatureLayout {
  std::size_t on = 0;
  std::size_t off = 0;

  std::size_t total() const noexcept { return on + off; }
  std::size_t index(const FeatureEvent& e) const noexcept {
    return e.channel == Channel::On ? e.feature : on + e.feature;
  }
};

/// A time-surface front end feeding one independent network per polarity
/// channel. A channel without a network still updates the surface but
/// produces no feature events.
class FeatureExtractor {
 public:
  FeatureExtractor(SurfaceParams surface, std::optional<FeastNetwork> on,
                   std::optional<FeastNetwork> off);

  const SurfaceParams& surface() const noexcept { return surface_; }
  bool has(Channel c) const noexcept { return nets_[idx(c)].has_value(); }
  const FeastNetwork& network(Channel c) const;
  FeastNetwork& network(Channel c);
  FeatureLayout layout() const noexcept;

 private:
  static std::size_t idx(Channel c) noexcept { return static_cast<std::size_t>(c); }

  SurfaceParams surface_;
  std::array<std::optional<FeastNetwork>, 2> nets_;
};

/// Trains an extractor across any number of streams. Each stream gets a
/// fresh surface; networks and monitors carry over.
class Trainer {
 public:
  explicit Trainer(FeatureExtractor& extractor,
                   std::size_t monitor_period = kDefaultMonitorPeriod);

  /// surface update, descriptor, train_step for every event in order. Wins
  /// produce feature events; misses are discarded.
  std::vector<FeatureEvent> train(const EventStream& stream);

  /// Monitor of a channel's network (must exist).
  const MonitorRecorder& monitor(Channel c) const;

 private:
  FeatureExtractor& extractor_;
  std::array<std::optional<MonitorRecorder>, 2> monitors_;
  std::vector<double> descriptor_;
};

struct TrainResult {
  std::vector<FeatureEvent> events;
  std::array<std::optional<MonitorLog>, 2> logs;  // indexed by Channel
};

TrainResult train_stream(FeatureExtractor& extractor, const EventStream& stream,
                         std::size_t monitor_period = kDefaultMonitorPeriod);

/// Nearest-feature assignment for every event on a channel that has a
/// network; thresholds are ignored and the networks are not modified.
std::vector<FeatureEvent> infer_stream(const FeatureExtractor& extractor,
                                       const EventStream& stream);

/// Per-feature event counts in layout order.
std::vector<std::uint64_t> feature_counts(std::span<const FeatureEvent> events,
                                          const FeatureLayout& layout);

}  // namespace feast
