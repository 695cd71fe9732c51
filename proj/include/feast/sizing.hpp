#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "feast/events.hpp"
#include "feast/network.hpp"
#include "feast/surface.hpp"

namespace feast {

/// A feature counts as a noise feature when at least `center_energy_frac`
/// of its (unit) squared weight mass sits on the central pixel.
struct NoiseCriterion {
  double center_energy_frac = 0.8;

  void validate() const;
};

bool is_noise_feature(std::span<const double> weights, int roi_w,
                      const NoiseCriterion& criterion = {});
std::size_t count_noise_features(const FeastNetwork& net, const NoiseCriterion& criterion = {});

enum class SizeFlag : std::uint8_t { InRange, Undersized, Oversized };
const char* to_string(SizeFlag f) noexcept;

struct SizeTrial {
  std::size_t size = 0;
  double mean_noise = 0.0;
  std::size_t min_noise = 0;
  std::size_t max_noise = 0;
  std::vector<std::size_t> per_trial;
};

struct SizeSweepResult {
  std::size_t chosen = 0;
  SizeFlag flag = SizeFlag::InRange;
  std::vector<SizeTrial> sizes;
};

struct SizeSweepParams {
  std::vector<std::size_t> candidates;  // ascending
  double target_min = 2.0;
  double target_max = 4.0;
  std::size_t trials = 5;
  std::uint64_t seed = 0;
  FeastParams feast;        // n_features is overridden per candidate
  SurfaceParams surface;
  Channel channel = Channel::On;
  NoiseCriterion criterion;
};

/// Trains one network per (candidate size, trial) on the `channel` events of
/// `streams` and picks the smallest size whose mean noise-feature count lies
/// in [target_min, target_max]. When no size qualifies, returns the size
/// nearest the range (largest on ties below it, smallest on ties above it)
/// and flags it.
SizeSweepResult size_sweep(std::span<const EventStream> streams, const SizeSweepParams& params);

}  // namespace feast
