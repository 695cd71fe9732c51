#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "feast/error.hpp"
#include "feast/surface.hpp"

using namespace feast;

TEST(Surface, FreshUpdateTouchesOneCell) {
  SurfaceState s(8, 8);
  s.update({3, 4, Polarity::On, 100});
  EXPECT_EQ(s.last_t(Channel::On, 3, 4), 100);
  int touched = 0;
  for (Channel c : {Channel::On, Channel::Off}) {
    for (auto t : s.channel(c)) touched += t != SurfaceState::kNever;
  }
  EXPECT_EQ(touched, 1);
}

TEST(Surface, EqualTimestampsAccepted) {
  SurfaceState s(4, 4);
  s.update({1, 1, Polarity::On, 100});
  EXPECT_NO_THROW(s.update({1, 1, Polarity::On, 100}));
}

TEST(Surface, TimeRegressionRejected) {
  SurfaceState s(4, 4);
  s.update({1, 1, Polarity::On, 100});
  EXPECT_THROW(s.update({1, 1, Polarity::On, 99}), TimeRegressionError);
  EXPECT_EQ(s.last_t(Channel::On, 1, 1), 100);
}

TEST(Surface, OffSensorRejected) {
  SurfaceState s(4, 4);
  EXPECT_THROW(s.update({4, 0, Polarity::On, 1}), OutOfRangeError);
}

TEST(Surface, ChannelsAreSeparate) {
  SurfaceState s(4, 4);
  s.update({1, 1, Polarity::Off, 7});
  EXPECT_EQ(s.last_t(Channel::Off, 1, 1), 7);
  EXPECT_EQ(s.last_t(Channel::On, 1, 1), SurfaceState::kNever);
  const SurfaceState copy = surface_update(s, {2, 2, Polarity::On, 9});
  EXPECT_EQ(copy.last_t(Channel::On, 2, 2), 9);
  EXPECT_EQ(s.last_t(Channel::On, 2, 2), SurfaceState::kNever);
  s.reset();
  EXPECT_EQ(s.last_t(Channel::Off, 1, 1), SurfaceState::kNever);
}

TEST(Surface, ExponentialKernelValues) {
  SurfaceState s(4, 1);
  s.update({0, 0, Polarity::On, 0});
  s.update({1, 0, Polarity::On, 1000});
  const Frame f = sample_exponential(s, Channel::On, 1000, 1000.0);
  EXPECT_DOUBLE_EQ(f.at(1, 0), 1.0);
  EXPECT_NEAR(f.at(0, 0), 0.36787944117144233, 1e-15);
  EXPECT_EQ(f.at(2, 0), 0.0);
  EXPECT_THROW(sample_exponential(s, Channel::On, 1000, 0.0), ParameterError);
}

TEST(Surface, FixedWindowBoundaryInclusive) {
  SurfaceState s(3, 1);
  s.update({0, 0, Polarity::On, 0});
  s.update({1, 0, Polarity::On, 1});
  const Frame f = sample_fixed_window(s, Channel::On, 1001, 1000.0);
  EXPECT_EQ(f.at(0, 0), 0.0);  // tau + 1 us
  EXPECT_EQ(f.at(1, 0), 1.0);  // exactly tau
  EXPECT_EQ(f.at(2, 0), 0.0);  // untouched
  EXPECT_THROW(sample_fixed_window(s, Channel::On, 1, -1.0), ParameterError);
}

TEST(Surface, FrameValueRanges) {
  std::mt19937_64 rng(2);
  SurfaceState s(16, 16);
  Timestamp t = 0;
  for (int i = 0; i < 500; ++i) {
    t += rng() % 100;
    s.update({std::uint16_t(rng() % 16), std::uint16_t(rng() % 16), Polarity::On, t});
  }
  for (double v : sample_exponential(s, Channel::On, t, 3000.0).values) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  for (double v : sample_fixed_window(s, Channel::On, t, 3000.0).values) {
    EXPECT_TRUE(v == 0.0 || v == 1.0);
  }
}

TEST(Descriptor, SingleEventIsCenterOneHot) {
  SurfaceState s(34, 34);
  const Event e{17, 17, Polarity::On, 500};
  s.update(e);
  const Descriptor d = extract_descriptor(s, e, {10'000.0, 11, Kernel::Exponential});
  ASSERT_EQ(d.values.size(), 121u);
  for (std::size_t i = 0; i < 121; ++i) EXPECT_EQ(d.values[i], i == 60 ? 1.0 : 0.0);
}

TEST(Descriptor, TwoEventNormalisation) {
  const double tau = 1000.0;
  SurfaceState s(10, 10);
  s.update({4, 5, Polarity::On, 0});
  const Event e{5, 5, Polarity::On, 1000};
  s.update(e);
  const Descriptor d = extract_descriptor(s, e, {tau, 3, Kernel::Exponential});
  const double n = std::sqrt(1.0 + std::exp(-2.0));
  EXPECT_NEAR(d.values[4], 1.0 / n, 1e-12);
  EXPECT_NEAR(d.values[3], std::exp(-1.0) / n, 1e-12);  // left neighbour, row-major
  EXPECT_NEAR(d.values[4], 0.938, 1e-3);
  EXPECT_NEAR(d.values[3], 0.345, 1e-3);
}

TEST(Descriptor, RowMajorLayout) {
  SurfaceState s(10, 10);
  s.update({5, 6, Polarity::On, 0});  // one row below the centre
  const Event e{5, 5, Polarity::On, 0};
  s.update(e);
  const Descriptor d = extract_descriptor(s, e, {1000.0, 3, Kernel::Exponential});
  EXPECT_GT(d.values[7], 0.0);
  EXPECT_EQ(d.values[5], 0.0);
}

TEST(Descriptor, CornerIsZeroPadded) {
  SurfaceState s(34, 34);
  const Event e{0, 0, Polarity::Off, 10};
  s.update(e);
  const Descriptor d = extract_descriptor(s, e, {10'000.0, 11, Kernel::Exponential});
  int nonzero = 0;
  for (double v : d.values) nonzero += v != 0.0;
  EXPECT_EQ(nonzero, 1);
  EXPECT_EQ(d.values[60], 1.0);
}

TEST(Descriptor, ZeroWindowIsInvariantError) {
  SurfaceState s(8, 8);
  EXPECT_THROW(extract_descriptor(s, {3, 3, Polarity::On, 0}, {}), InvariantError);
}

TEST(Descriptor, ParameterValidation) {
  SurfaceState s(8, 8);
  const Event e{3, 3, Polarity::On, 0};
  s.update(e);
  EXPECT_THROW(extract_descriptor(s, e, {1000.0, 4, Kernel::Exponential}), ParameterError);
  EXPECT_THROW(extract_descriptor(s, e, {0.0, 3, Kernel::Exponential}), ParameterError);
  EXPECT_THROW(extract_descriptor(s, {9, 0, Polarity::On, 0}, {}), OutOfRangeError);
}

TEST(Descriptor, UnitNormAndTemporalScaleInvariance) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const double k = 1.0 + double(rng() % 9);
    SurfaceState a(20, 20), b(20, 20);
    Timestamp t = 0;
    Event last{};
    for (int i = 0; i < 200; ++i) {
      t += Timestamp(rng() % 300);
      last = {std::uint16_t(rng() % 20), std::uint16_t(rng() % 20), rng() % 2 ? Polarity::On : Polarity::Off, t};
      a.update(last);
      b.update({last.x, last.y, last.p, Timestamp(double(t) * k)});
    }
    const Descriptor da = extract_descriptor(a, last, {2000.0, 7, Kernel::Exponential});
    const Descriptor db = extract_descriptor(
        b, {last.x, last.y, last.p, Timestamp(double(last.t) * k)}, {2000.0 * k, 7, Kernel::Exponential});
    double norm = 0.0;
    for (std::size_t i = 0; i < da.values.size(); ++i) {
      norm += da.values[i] * da.values[i];
      EXPECT_NEAR(da.values[i], db.values[i], 1e-9);
    }
    EXPECT_NEAR(std::sqrt(norm), 1.0, 1e-9);
  }
}

TEST(Descriptor, FixedKernelIsBinaryBeforeNorm) {
  SurfaceState s(10, 10);
  s.update({4, 4, Polarity::On, 0});
  s.update({6, 6, Polarity::On, 500});
  const Event e{5, 5, Polarity::On, 1000};
  s.update(e);
  const Descriptor d = extract_descriptor(s, e, {1000.0, 3, Kernel::FixedWindow});
  const double v = 1.0 / std::sqrt(3.0);
  EXPECT_NEAR(d.values[0], v, 1e-12);
  EXPECT_NEAR(d.values[4], v, 1e-12);
  EXPECT_NEAR(d.values[8], v, 1e-12);
}
