#include "feast/sizing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "feast/error.hpp"
#include "feast/extractor.hpp"

namespace feast {

void NoiseCriterion::validate() const {
  if (!(center_energy_frac > 0.0 && center_energy_frac < 1.0)) {
    throw ParameterError("center_energy_frac must lie in (0, 1)");
  }
}

bool is_noise_feature(std::span<const double> weights, int roi_w,
                      const NoiseCriterion& criterion) {
  criterion.validate();
  const std::size_t n = static_cast<std::size_t>(roi_w) * roi_w;
  if (roi_w <= 0 || roi_w % 2 == 0 || weights.size() != n) {
    throw ShapeMismatchError("weights do not form an odd roi_w x roi_w window");
  }
  const double c = weights[n / 2];
  return c * c >= criterion.center_energy_frac;
}

std::size_t count_noise_features(const FeastNetwork& net, const NoiseCriterion& criterion) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (is_noise_feature(net.weights(i), net.params().roi_w, criterion)) ++n;
  }
  return n;
}

const char* to_string(SizeFlag f) noexcept {
  switch (f) {
    case SizeFlag::InRange: return "in_range";
    case SizeFlag::Undersized: return "undersized";
    case SizeFlag::Oversized: return "oversized";
  }
  return "?";
}

namespace {

std::uint64_t trial_seed(std::uint64_t base, std::size_t size, std::size_t trial) {
  std::uint64_t x = base ^ (0x9E3779B97F4A7C15ull * (size + 1)) ^ (0xC2B2AE3D27D4EB4Full * (trial + 1));
  x ^= x >> 33;
  x *= 0xFF51AFD7ED558CCDull;
  return x ^ (x >> 33);
}

}  // namespace

SizeSweepResult size_sweep(std::span<const EventStream> streams, const SizeSweepParams& p) {
  if (p.candidates.empty()) throw ParameterError("size_sweep: no candidate sizes");
  if (!std::is_sorted(p.candidates.begin(), p.candidates.end())) {
    throw ParameterError("size_sweep: candidate sizes must be ascending");
  }
  if (p.trials == 0) throw ParameterError("size_sweep: trials must be positive");
  if (p.target_min > p.target_max) throw ParameterError("size_sweep: empty target range");
  p.criterion.validate();

  SizeSweepResult result;
  for (std::size_t size : p.candidates) {
    SizeTrial row;
    row.size = size;
    for (std::size_t trial = 0; trial < p.trials; ++trial) {
      FeastParams fp = p.feast;
      fp.n_features = size;
      std::optional<FeastNetwork> net = init_network(fp, trial_seed(p.seed, size, trial));
      FeatureExtractor ex(p.surface, p.channel == Channel::On ? std::move(net) : std::nullopt,
                          p.channel == Channel::Off ? std::move(net) : std::nullopt);
      Trainer trainer(ex);
      for (const auto& s : streams) trainer.train(s);
      row.per_trial.push_back(count_noise_features(ex.network(p.channel), p.criterion));
    }
    row.min_noise = *std::min_element(row.per_trial.begin(), row.per_trial.end());
    row.max_noise = *std::max_element(row.per_trial.begin(), row.per_trial.end());
    double sum = 0.0;
    for (auto c : row.per_trial) sum += double(c);
    row.mean_noise = sum / double(row.per_trial.size());
    result.sizes.push_back(std::move(row));
  }

  for (const auto& row : result.sizes) {
    if (row.mean_noise >= p.target_min && row.mean_noise <= p.target_max) {
      result.chosen = row.size;
      result.flag = SizeFlag::InRange;
      return result;
    }
  }
  // Nearest to the range; below-range ties favour larger networks and
  // above-range ties favour smaller ones.
  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& row : result.sizes) {
    const bool below = row.mean_noise < p.target_min;
    const double gap = below ? p.target_min - row.mean_noise : row.mean_noise - p.target_max;
    if (gap < best_gap || (gap == best_gap && below)) {
      best_gap = gap;
      result.chosen = row.size;
      result.flag = below ? SizeFlag::Undersized : SizeFlag::Oversized;
    }
  }
  return result;
}

}  // namespace feast
