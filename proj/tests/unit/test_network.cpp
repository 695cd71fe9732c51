#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "feast/error.hpp"
#include "feast/network.hpp"

using namespace feast;

namespace {

std::vector<double> random_unit(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  double s = 0.0;
  for (auto& x : v) s += (x = g(rng)) * x;
  for (auto& x : v) x /= std::sqrt(s);
  return v;
}

FeastParams tiny(std::size_t n, int w = 1) {
  FeastParams p;
  p.n_features = n;
  p.roi_w = w;
  return p;
}

// Features living in the first two coordinates of a 3x3 window.
FeastNetwork net2(std::vector<double> w, std::vector<double> th, double eta = 0.001) {
  FeastParams p = tiny(th.size(), 3);
  p.eta = eta;
  std::vector<double> padded;
  for (std::size_t i = 0; i < th.size(); ++i) {
    padded.push_back(w[2 * i]);
    padded.push_back(w[2 * i + 1]);
    padded.insert(padded.end(), 7, 0.0);
  }
  return FeastNetwork(p, padded, th);
}

std::vector<double> d2(double a, double b) {
  std::vector<double> v(9, 0.0);
  v[0] = a;
  v[1] = b;
  return v;
}

}  // namespace

TEST(CosineDistance, Examples) {
  const std::vector<double> a{1, 0}, b{0, 1}, c{-1, 0};
  EXPECT_EQ(cosine_distance(a, a), 0.0);
  EXPECT_EQ(cosine_distance(a, b), 1.0);
  EXPECT_EQ(cosine_distance(a, c), 2.0);
  EXPECT_THROW(cosine_distance(a, std::vector<double>{1, 0, 0}), ShapeMismatchError);
}

TEST(CosineDistance, ClampsRoundingExcursions) {
  const std::vector<double> a{0.6, 0.8};
  const double d = cosine_distance(a, a);
  EXPECT_GE(d, 0.0);
  EXPECT_LE(d, 1e-15);
}

TEST(Init, ShapesAndUnitNorm) {
  FeastParams p;
  const FeastNetwork net = init_network(p, 42);
  ASSERT_EQ(net.size(), 25u);
  ASSERT_EQ(net.dim(), 121u);
  for (std::size_t i = 0; i < net.size(); ++i) {
    double s = 0.0;
    for (double v : net.weights(i)) s += v * v;
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_GE(net.threshold(i), 0.0);
    EXPECT_LE(net.threshold(i), 1.0);
    EXPECT_EQ(net.win_counts()[i], 0u);
  }
}

TEST(Init, DeterministicAndDegenerate) {
  FeastParams p;
  const FeastNetwork a = init_network(p, 3), b = init_network(p, 3), c = init_network(p, 4);
  EXPECT_TRUE(std::equal(a.weights().begin(), a.weights().end(), b.weights().begin()));
  EXPECT_FALSE(std::equal(a.weights().begin(), a.weights().end(), c.weights().begin()));
  p.n_features = 1;
  EXPECT_EQ(init_network(p, 1).size(), 1u);
}

TEST(Init, ThresholdRangeFollowsParameter) {
  FeastParams p;
  p.n_features = 200;
  p.init_threshold_max = 2.0;
  const FeastNetwork net = init_network(p, 1);
  double mx = 0.0;
  for (double t : net.thresholds()) mx = std::max(mx, t);
  EXPECT_GT(mx, 1.0);
  EXPECT_LE(mx, 2.0);
}

TEST(Params, Validation) {
  FeastParams p;
  EXPECT_NO_THROW(p.validate());
  p.n_features = 0;
  EXPECT_THROW(p.validate(), ParameterError);
  p = {};
  p.eta = 1.5;
  EXPECT_THROW(p.validate(), ParameterError);
  p = {};
  p.roi_w = 4;
  EXPECT_THROW(p.validate(), ParameterError);
  p = {};
  p.delta_inc = -1;
  EXPECT_THROW(p.validate(), ParameterError);
}

TEST(Network, ConstructorNormalisesAndClamps) {
  const FeastNetwork net = net2({3, 4, 0, 2}, {-0.5, 3.0});
  EXPECT_NEAR(net.weights(0)[0], 0.6, 1e-15);
  EXPECT_NEAR(net.weights(0)[1], 0.8, 1e-15);
  EXPECT_EQ(net.threshold(0), 0.0);
  EXPECT_EQ(net.threshold(1), 2.0);
  EXPECT_THROW(FeastNetwork(tiny(2, 1), {1.0}, {0.1, 0.1}), ShapeMismatchError);
}

TEST(Match, ExactFeatureWins) {
  std::mt19937_64 rng(1);
  FeastParams p = tiny(5, 3);
  std::vector<double> w;
  for (int i = 0; i < 5; ++i) {
    const auto v = random_unit(rng, 9);
    w.insert(w.end(), v.begin(), v.end());
  }
  const FeastNetwork net(p, w, std::vector<double>(5, 0.1));
  const auto d = std::vector<double>(net.weights(3).begin(), net.weights(3).end());
  const MatchResult m = net.match(d);
  EXPECT_TRUE(m.win);
  EXPECT_EQ(m.feature, 3u);
  EXPECT_NEAR(m.distance, 0.0, 1e-15);
}

TEST(Match, AllZeroThresholdsMiss) {
  const FeastNetwork net = net2({1, 0, 0, 1}, {0.0, 0.0});
  EXPECT_FALSE(net.match(d2(0.6, 0.8)).win);
}

TEST(Match, SmallestQualifyingDistanceWins) {
  // Features at distance 0.2 and 0.3 from d, thresholds 0.25 and 0.5.
  const double a = std::acos(0.8), b = std::acos(0.7);
  const FeastNetwork net = net2({std::cos(a), std::sin(a), std::cos(b), -std::sin(b)}, {0.25, 0.5});
  const MatchResult m = net.match(d2(1, 0));
  EXPECT_TRUE(m.win);
  EXPECT_EQ(m.feature, 0u);
  EXPECT_NEAR(m.distance, 0.2, 1e-12);
  // With the first threshold too small the second wins.
  const FeastNetwork net_b = net2({std::cos(a), std::sin(a), std::cos(b), -std::sin(b)}, {0.15, 0.5});
  EXPECT_EQ(net_b.match(d2(1, 0)).feature, 1u);
}

TEST(Match, TiesGoToLowestIndex) {
  const FeastNetwork net = net2({0, 1, 1, 0, 1, 0}, {2.0, 1.0, 1.0});
  const MatchResult m = net.match(d2(1, 0));
  EXPECT_EQ(m.feature, 1u);
  EXPECT_EQ(net.nearest(d2(1, 0)), 1u);
}

TEST(TrainStep, MissExpandsAllThresholds) {
  FeastNetwork net = net2({1, 0, 1, 0}, {0.1, 0.2});
  const MatchResult m = net.train_step(d2(0, 1));
  EXPECT_FALSE(m.win);
  EXPECT_NEAR(net.threshold(0), 0.103, 1e-15);
  EXPECT_NEAR(net.threshold(1), 0.203, 1e-15);
  EXPECT_EQ(net.weights(0)[0], 1.0);
}

TEST(TrainStep, ThresholdCeiling) {
  FeastNetwork net = net2({1, 0}, {1.999});
  net.set_threshold(0, 1.999);
  // d at distance 2 from the feature: only qualifies at threshold 2, so miss.
  net.train_step(d2(-1, 0));
  EXPECT_EQ(net.threshold(0), 2.0);
}

TEST(TrainStep, WinFloorsThresholdAtZero) {
  FeastNetwork net = net2({1, 0}, {0.0005});
  const MatchResult m = net.train_step(d2(1, 0));
  EXPECT_TRUE(m.win);
  EXPECT_EQ(net.threshold(0), 0.0);
  EXPECT_EQ(net.win_counts()[0], 1u);
}

TEST(TrainStep, WinMovesAndRenormalises) {
  FeastNetwork net = net2({1, 0}, {1.0}, 0.5);
  net.train_step(d2(0, 1));
  EXPECT_NEAR(net.weights(0)[0], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(net.weights(0)[1], 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(TrainStep, ExactlyOneUpdateAndAttraction) {
  std::mt19937_64 rng(17);
  FeastParams p = tiny(6, 3);
  p.eta = 0.05;
  p.init_threshold_max = 2.0;
  FeastNetwork net = init_network(p, 8);
  for (int step = 0; step < 5000; ++step) {
    const auto d = random_unit(rng, 9);
    const std::vector<double> w0(net.weights().begin(), net.weights().end());
    const std::vector<double> t0(net.thresholds().begin(), net.thresholds().end());
    const MatchResult m = net.train_step(d);
    int changed_w = 0, changed_t = 0;
    for (std::size_t i = 0; i < net.size(); ++i) {
      bool wc = false;
      for (std::size_t k = 0; k < 9; ++k) wc |= net.weights(i)[k] != w0[i * 9 + k];
      changed_w += wc;
      changed_t += net.threshold(i) != t0[i];
    }
    if (m.win) {
      EXPECT_LE(changed_w, 1);
      EXPECT_LE(changed_t, 1);
      const std::vector<double> before(w0.begin() + long(m.feature * 9), w0.begin() + long(m.feature * 9 + 9));
      if (m.distance > 1e-12 && m.distance < 2.0 - 1e-9) {
        EXPECT_LT(cosine_distance(net.weights(m.feature), d), cosine_distance(before, d));
      }
    } else {
      EXPECT_EQ(changed_w, 0);
      for (std::size_t i = 0; i < net.size(); ++i) {
        EXPECT_NEAR(net.threshold(i), std::min(2.0, t0[i] + p.delta_inc), 1e-15);
      }
    }
  }
}

TEST(Inference, IgnoresThresholds) {
  FeastNetwork net = net2({1, 0, 0, 1}, {0.0, 0.0});
  EXPECT_EQ(net.nearest(d2(0.1, 0.99)), 1u);
  const MatchResult m = net.nearest_match(d2(1, 0));
  EXPECT_TRUE(m.win);
  EXPECT_EQ(m.feature, 0u);
  const FeastNetwork single = net2({1, 0}, {0.0});
  EXPECT_EQ(single.nearest(d2(-1, 0)), 0u);
}

TEST(Network, MutatorsValidate) {
  FeastNetwork net = net2({1, 0, 0, 1}, {0.1, 0.1});
  EXPECT_THROW(net.set_threshold(2, 0.1), OutOfRangeError);
  EXPECT_THROW(net.set_weights(0, std::vector<double>{1.0}), ShapeMismatchError);
  net.set_weights(0, d2(0, 3));
  EXPECT_NEAR(net.weights(0)[1], 1.0, 1e-15);
  net.train_step(d2(0, 1));
  net.reset_win_counts();
  EXPECT_EQ(net.win_counts()[0] + net.win_counts()[1], 0u);
}
