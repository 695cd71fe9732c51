#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "feast/events.hpp"

namespace feast {

/// Surface channel. ON and OFF events live on separate non-negative surfaces.
enum class Channel : std::uint8_t { On = 0, Off = 1 };

constexpr Channel channel_of(Polarity p) noexcept {
  return p == Polarity::On ? Channel::On : Channel::Off;
}

enum class Kernel : std::uint8_t { Exponential, FixedWindow };

struct SurfaceParams {
  double tau_us = 10'000.0;
  int roi_w = 11;
  Kernel kernel = Kernel::Exponential;

  /// Throws ParameterError unless tau > 0 and roi_w is odd and positive.
  void validate() const;
};

/// Per-pixel, per-channel timestamp of the most recent event.
class SurfaceState {
 public:
  static constexpr Timestamp kNever = std::numeric_limits<Timestamp>::min();

  SurfaceState(std::uint16_t width, std::uint16_t height);

  std::uint16_t width() const noexcept { return width_; }
  std::uint16_t height() const noexcept { return height_; }

  /// Writes e.t at (e.x, e.y) on the event's channel.
  /// Throws OutOfRangeError off-sensor and TimeRegressionError on t going back.
  void update(const Event& e);

  Timestamp last_t(Channel c, int x, int y) const noexcept {
    return cells_[static_cast<std::size_t>(c)][static_cast<std::size_t>(y) * width_ +
                                               static_cast<std::size_t>(x)];
  }
  std::span<const Timestamp> channel(Channel c) const noexcept {
    return cells_[static_cast<std::size_t>(c)];
  }

  void reset();

 private:
  std::uint16_t width_;
  std::uint16_t height_;
  std::array<std::vector<Timestamp>, 2> cells_;
};

/// Value-semantics form of SurfaceState::update.
SurfaceState surface_update(SurfaceState state, const Event& e);

struct Frame {
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::vector<double> values;  // row-major

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// exp((last_t - t_now) / tau) on touched pixels, 0 elsewhere. Pixels
/// stamped after t_now also read 0.
Frame sample_exponential(const SurfaceState& s, Channel c, Timestamp t_now, double tau_us);
/// 1 where 0 <= t_now - last_t <= tau, else 0.
Frame sample_fixed_window(const SurfaceState& s, Channel c, Timestamp t_now, double tau_us);

/// Surface value of one cell under a kernel.
double kernel_value(Kernel k, Timestamp last_t, Timestamp t_now, double tau_us) noexcept;

struct Descriptor {
  std::vector<double> values;
  Event source;
};

/// Reads the roi_w x roi_w window centred on `e` from e's channel at t = e.t,
/// row-major (dy outer, dx inner), off-sensor cells 0, then L2-normalises.
/// The event must already have been applied to the surface; a zero window
/// throws InvariantError.
Descriptor extract_descriptor(const SurfaceState& s, const Event& e, const SurfaceParams& p);

/// Allocation-free variant for the per-event hot path. `out` must have
/// roi_w * roi_w entries. Does not re-validate `p`.
void extract_descriptor_into(const SurfaceState& s, const Event& e, const SurfaceParams& p,
                             std::span<double> out);

}  // namespace feast
