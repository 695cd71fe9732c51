#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "feast/error.hpp"
#include "feast/extractor.hpp"
#include "feast/sizing.hpp"
#include "feast/synth.hpp"

using namespace feast;

namespace {

std::vector<double> one_hot(int w) {
  std::vector<double> v(std::size_t(w * w), 0.0);
  v[v.size() / 2] = 1.0;
  return v;
}

}  // namespace

TEST(NoiseFeature, OneHotAndUniform) {
  EXPECT_TRUE(is_noise_feature(one_hot(11), 11));
  const std::vector<double> u(121, 1.0 / 11.0);
  EXPECT_FALSE(is_noise_feature(u, 11));
}

TEST(NoiseFeature, ThresholdBoundary) {
  // Centre 0.9 with residual 0.19 spread over the other cells.
  std::vector<double> v(121, std::sqrt(0.19 / 120.0));
  v[60] = 0.9;
  EXPECT_TRUE(is_noise_feature(v, 11));
  v[60] = 0.89;
  for (auto& x : v) if (&x != &v[60]) x = std::sqrt((1 - 0.89 * 0.89) / 120.0);
  EXPECT_FALSE(is_noise_feature(v, 11));
}

TEST(NoiseFeature, SignAndPermutationInvariant) {
  std::mt19937_64 rng(1);
  std::vector<double> v(49);
  for (auto& x : v) x = double(rng() % 100) / 1000.0;
  v[24] = 0.95;
  double n = 0;
  for (double x : v) n += x * x;
  for (auto& x : v) x /= std::sqrt(n);
  const bool base = is_noise_feature(v, 7);
  std::vector<double> neg = v;
  for (auto& x : neg) x = -x;
  EXPECT_EQ(is_noise_feature(neg, 7), base);
  std::swap(v[0], v[48]);
  std::swap(v[3], v[30]);
  EXPECT_EQ(is_noise_feature(v, 7), base);
}

TEST(NoiseFeature, Validation) {
  EXPECT_THROW(is_noise_feature(std::vector<double>(10), 3), ShapeMismatchError);
  EXPECT_THROW(is_noise_feature(one_hot(3), 3, {1.5}), ParameterError);
}

TEST(CountNoise, OneHotNetworkAndRandomNetwork) {
  FeastParams p;
  p.n_features = 5;
  p.roi_w = 11;
  std::vector<double> w;
  for (int i = 0; i < 5; ++i) {
    const auto v = one_hot(11);
    w.insert(w.end(), v.begin(), v.end());
  }
  EXPECT_EQ(count_noise_features(FeastNetwork(p, w, std::vector<double>(5, 0.5))), 5u);

  // Random unit vectors in 121 dims essentially never concentrate 80% on the centre.
  p.n_features = 100;
  std::size_t total = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) total += count_noise_features(init_network(p, seed));
  EXPECT_EQ(total, 0u);
}

TEST(CountNoise, PureNoiseTraining) {
  FeastParams p;
  p.n_features = 10;
  p.roi_w = 11;
  FeatureExtractor ex({10'000.0, 11, Kernel::Exponential}, init_network(p, 2), std::nullopt);
  Trainer t(ex);
  t.train(synth_noise(32, 32, 60'000'000, 1.0, 3));
  EXPECT_GE(count_noise_features(ex.network(Channel::On)), p.n_features - 1);
}

TEST(SizeSweep, PureNoisePicksSmallestFlagged) {
  SizeSweepParams sp;
  sp.candidates = {5, 8, 12};
  sp.trials = 2;
  sp.feast.roi_w = 7;
  sp.surface = {10'000.0, 7, Kernel::Exponential};
  const EventStream streams[] = {synth_noise(32, 32, 60'000'000, 1.0, 1)};
  const SizeSweepResult r = size_sweep(streams, sp);
  EXPECT_EQ(r.chosen, 5u);
  EXPECT_EQ(r.flag, SizeFlag::Oversized);
  ASSERT_EQ(r.sizes.size(), 3u);
  EXPECT_EQ(r.sizes[0].per_trial.size(), 2u);
}

TEST(SizeSweep, NoNoiseFeaturesPicksLargestUndersized) {
  SizeSweepParams sp;
  sp.candidates = {2, 3, 4};
  sp.trials = 1;
  sp.feast.roi_w = 5;
  sp.surface = {10'000.0, 5, Kernel::Exponential};
  const EventStream streams[] = {EventStream{16, 16, {}}};
  const SizeSweepResult r = size_sweep(streams, sp);
  EXPECT_EQ(r.chosen, 4u);
  EXPECT_EQ(r.flag, SizeFlag::Undersized);
  EXPECT_STREQ(to_string(r.flag), "undersized");
}

TEST(SizeSweep, Validation) {
  SizeSweepParams sp;
  const EventStream streams[] = {EventStream{16, 16, {}}};
  EXPECT_THROW(size_sweep(streams, sp), ParameterError);
  sp.candidates = {5, 3};
  EXPECT_THROW(size_sweep(streams, sp), ParameterError);
}
