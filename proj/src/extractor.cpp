#include "feast/extractor.hpp"

#include "feast/error.hpp"

namespace feast {

FeatureExtractor::FeatureExtractor(SurfaceParams surface, std::optional<FeastNetwork> on,
                                   std::optional<FeastNetwork> off)
    : surface_(surface) {
  surface_.validate();
  nets_[idx(Channel::On)] = std::move(on);
  nets_[idx(Channel::Off)] = std::move(off);
  for (const auto& n : nets_) {
    if (n && n->params().roi_w != surface_.roi_w) {
      throw ShapeMismatchError("network ROI width does not match the surface ROI width");
    }
  }
}

const FeastNetwork& FeatureExtractor::network(Channel c) const {
  if (!nets_[idx(c)]) throw Error("no network configured for this channel");
  return *nets_[idx(c)];
}

FeastNetwork& FeatureExtractor::network(Channel c) {
  if (!nets_[idx(c)]) throw Error("no network configured for this channel");
  return *nets_[idx(c)];
}

FeatureLayout FeatureExtractor::layout() const noexcept {
  return {has(Channel::On) ? nets_[0]->size() : 0, has(Channel::Off) ? nets_[1]->size() : 0};
}

Trainer::Trainer(FeatureExtractor& extractor, std::size_t monitor_period)
    : extractor_(extractor),
      descriptor_(static_cast<std::size_t>(extractor.surface().roi_w) *
                  extractor.surface().roi_w) {
  for (Channel c : {Channel::On, Channel::Off}) {
    if (extractor_.has(c)) {
      monitors_[static_cast<std::size_t>(c)].emplace(extractor_.network(c), monitor_period);
    }
  }
}

std::vector<FeatureEvent> Trainer::train(const EventStream& stream) {
  std::vector<FeatureEvent> out;
  out.reserve(stream.size());
  SurfaceState surface(stream.width, stream.height);
  const SurfaceParams& sp = extractor_.surface();
  for (const Event& e : stream.events) {
    surface.update(e);
    const Channel c = channel_of(e.p);
    auto& monitor = monitors_[static_cast<std::size_t>(c)];
    if (!monitor) continue;
    extract_descriptor_into(surface, e, sp, descriptor_);
    FeastNetwork& net = extractor_.network(c);
    const MatchResult m = net.train_step(descriptor_);
    monitor->record(m, net);
    if (m.win) out.push_back(FeatureEvent{static_cast<std::uint32_t>(m.feature), e.t, c});
  }
  return out;
}

const MonitorRecorder& Trainer::monitor(Channel c) const {
  const auto& m = monitors_[static_cast<std::size_t>(c)];
  if (!m) throw Error("no network configured for this channel");
  return *m;
}

TrainResult train_stream(FeatureExtractor& extractor, const EventStream& stream,
                         std::size_t monitor_period) {
  Trainer trainer(extractor, monitor_period);
  TrainResult result;
  result.events = trainer.train(stream);
  for (Channel c : {Channel::On, Channel::Off}) {
    if (extractor.has(c)) result.logs[static_cast<std::size_t>(c)] = trainer.monitor(c).log();
  }
  return result;
}

std::vector<FeatureEvent> infer_stream(const FeatureExtractor& extractor,
                                       const EventStream& stream) {
  std::vector<FeatureEvent> out;
  out.reserve(stream.size());
  SurfaceState surface(stream.width, stream.height);
  const SurfaceParams& sp = extractor.surface();
  std::vector<double> d(static_cast<std::size_t>(sp.roi_w) * sp.roi_w);
  for (const Event& e : stream.events) {
    surface.update(e);
    const Channel c = channel_of(e.p);
    if (!extractor.has(c)) continue;
    extract_descriptor_into(surface, e, sp, d);
    const auto f = extractor.network(c).nearest(d);
    out.push_back(FeatureEvent{static_cast<std::uint32_t>(f), e.t, c});
  }
  return out;
}

std::vector<std::uint64_t> feature_counts(std::span<const FeatureEvent> events,
                                          const FeatureLayout& layout) {
  std::vector<std::uint64_t> counts(layout.total(), 0);
  for (const auto& e : events) {
    const auto i = layout.index(e);
    if (i >= counts.size()) throw OutOfRangeError("feature event outside the layout");
    ++counts[i];
  }
  return counts;
}

}  // namespace feast
