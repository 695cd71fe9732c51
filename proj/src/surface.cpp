#include "feast/surface.hpp"

#include <cmath>
#include <string>

#include "feast/error.hpp"

namespace feast {

void SurfaceParams::validate() const {
  if (!(tau_us > 0.0) || !std::isfinite(tau_us)) {
    throw ParameterError("surface tau must be positive, got " + std::to_string(tau_us));
  }
  if (roi_w <= 0 || roi_w % 2 == 0) {
    throw ParameterError("ROI width must be odd and positive, got " + std::to_string(roi_w));
  }
}

SurfaceState::SurfaceState(std::uint16_t width, std::uint16_t height)
    : width_(width), height_(height) {
  for (auto& c : cells_) c.assign(static_cast<std::size_t>(width) * height, kNever);
}

void SurfaceState::update(const Event& e) {
  if (e.x >= width_ || e.y >= height_) {
    throw OutOfRangeError("event at (" + std::to_string(e.x) + ", " + std::to_string(e.y) +
                          ") outside " + std::to_string(width_) + "x" +
                          std::to_string(height_) + " surface");
  }
  Timestamp& cell = cells_[static_cast<std::size_t>(channel_of(e.p))]
                          [static_cast<std::size_t>(e.y) * width_ + e.x];
  if (e.t < cell) {
    throw TimeRegressionError("time regression at pixel (" + std::to_string(e.x) + ", " +
                              std::to_string(e.y) + "): " + std::to_string(e.t) + " < " +
                              std::to_string(cell));
  }
  cell = e.t;
}

void SurfaceState::reset() {
  for (auto& c : cells_) std::fill(c.begin(), c.end(), kNever);
}

SurfaceState surface_update(SurfaceState state, const Event& e) {
  state.update(e);
  return state;
}

double kernel_value(Kernel k, Timestamp last_t, Timestamp t_now, double tau_us) noexcept {
  if (last_t == SurfaceState::kNever || last_t > t_now) return 0.0;
  const auto age = t_now - last_t;
  if (k == Kernel::FixedWindow) return double(age) <= tau_us ? 1.0 : 0.0;
  return std::exp(-double(age) / tau_us);
}

namespace {

Frame sample(const SurfaceState& s, Channel c, Timestamp t_now, double tau_us, Kernel k) {
  if (!(tau_us > 0.0)) throw ParameterError("surface tau must be positive");
  Frame f;
  f.width = s.width();
  f.height = s.height();
  const auto cells = s.channel(c);
  f.values.resize(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    f.values[i] = kernel_value(k, cells[i], t_now, tau_us);
  }
  return f;
}

}  // namespace

Frame sample_exponential(const SurfaceState& s, Channel c, Timestamp t_now, double tau_us) {
  return sample(s, c, t_now, tau_us, Kernel::Exponential);
}

Frame sample_fixed_window(const SurfaceState& s, Channel c, Timestamp t_now, double tau_us) {
  return sample(s, c, t_now, tau_us, Kernel::FixedWindow);
}

void extract_descriptor_into(const SurfaceState& s, const Event& e, const SurfaceParams& p,
                             std::span<double> out) {
  const int w = p.roi_w;
  const int r = w / 2;
  const auto cells = s.channel(channel_of(e.p));
  const int W = s.width(), H = s.height();
  double norm2 = 0.0;
  std::size_t i = 0;
  for (int dy = -r; dy <= r; ++dy) {
    const int y = int(e.y) + dy;
    for (int dx = -r; dx <= r; ++dx, ++i) {
      const int x = int(e.x) + dx;
      double v = 0.0;
      if (x >= 0 && x < W && y >= 0 && y < H) {
        v = kernel_value(p.kernel, cells[std::size_t(y) * W + x], e.t, p.tau_us);
      }
      out[i] = v;
      norm2 += v * v;
    }
  }
  if (!(norm2 > 0.0)) {
    throw InvariantError("zero descriptor at (" + std::to_string(e.x) + ", " +
                         std::to_string(e.y) + "): event not applied to the surface");
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& v : out) v *= inv;
}

Descriptor extract_descriptor(const SurfaceState& s, const Event& e, const SurfaceParams& p) {
  p.validate();
  if (e.x >= s.width() || e.y >= s.height()) {
    throw OutOfRangeError("descriptor requested outside the surface");
  }
  Descriptor d;
  d.source = e;
  d.values.resize(static_cast<std::size_t>(p.roi_w) * p.roi_w);
  extract_descriptor_into(s, e, p, d.values);
  return d;
}

}  // namespace feast
