#include "feast/synth.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "feast/error.hpp"

namespace feast {

namespace {

// Point in the motion frame: u along the direction of travel, s across it.
struct LocalPoint {
  double u;
  double s;
};
using Polygon = std::vector<LocalPoint>;  // convex, any winding

Polygon rect(double u0, double u1, double s0, double s1) {
  return {{u0, s0}, {u1, s0}, {u1, s1}, {u0, s1}};
}

std::vector<Polygon> outline(const ShapeSpec& shape, double field_extent) {
  const double a = shape.size;
  const double h = a / 2.0;
  const double k = a / 6.0;
  if (shape.kind == "bar") return {rect(-h, h, -field_extent, field_extent)};
  if (shape.kind == "square") return {rect(-h, h, -h, h)};
  if (shape.kind == "triangle") return {{{h, 0.0}, {-h, h}, {-h, -h}}};
  if (shape.kind == "diamond") return {{{h, 0.0}, {0.0, h}, {-h, 0.0}, {0.0, -h}}};
  if (shape.kind == "cross") return {rect(-h, h, -k, k), rect(-k, k, -h, h)};
  if (shape.kind == "ell") return {rect(-h, h, -h, -k), rect(-h, -k, -h, h)};
  if (shape.kind == "tee") return {rect(k, h, -h, h), rect(-h, k, -k, k)};
  throw ParameterError("unknown shape kind '" + shape.kind + "'");
}

double default_size(std::string_view kind) { return kind == "bar" ? 4.0 : 10.0; }

double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParameterError("bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Extent [lo, hi] of a convex polygon along u on the line s = const.
bool slice(const Polygon& poly, double s, double& lo, double& hi) {
  bool found = false;
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const LocalPoint& a = poly[i];
    const LocalPoint& b = poly[(i + 1) % poly.size()];
    if (a.s == b.s) {
      if (a.s == s) {
        lo = std::min({lo, a.u, b.u});
        hi = std::max({hi, a.u, b.u});
        found = true;
      }
      continue;
    }
    if ((a.s - s) * (b.s - s) > 0.0) continue;
    const double u = a.u + (s - a.s) / (b.s - a.s) * (b.u - a.u);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    found = true;
  }
  return found;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

struct Frame2 {
  double cu, cs;  // unit direction of travel
  double nu, ns;  // unit normal
};

// Emits the leading-edge events of one sweep. `t_limit` drops events at or
// after it (< 0 disables the limit).
Sweep emit_sweep(const SynthParams& p, std::size_t shape_index, Timestamp t0, double speed,
                 double direction_deg, double offset_frac, Timestamp t_limit,
                 std::vector<Event>& out) {
  const double cx = (p.width - 1) / 2.0;
  const double cy = (p.height - 1) / 2.0;
  const double theta = direction_deg * std::numbers::pi / 180.0;
  const double dx = std::cos(theta), dy = std::sin(theta);
  const double nx = -dy, ny = dx;

  double pmin = std::numeric_limits<double>::infinity(), pmax = -pmin;
  double perp = 0.0;
  for (double x : {0.0, double(p.width - 1)}) {
    for (double y : {0.0, double(p.height - 1)}) {
      const double a = (x - cx) * dx + (y - cy) * dy;
      pmin = std::min(pmin, a);
      pmax = std::max(pmax, a);
      perp = std::max(perp, std::abs((x - cx) * nx + (y - cy) * ny));
    }
  }
  const double field_extent = 2.0 * std::max(p.width, p.height) + perp;
  const auto parts = outline(p.shapes[shape_index], field_extent);
  double umin = std::numeric_limits<double>::infinity(), umax = -umin;
  for (const auto& poly : parts) {
    for (const auto& v : poly) {
      umin = std::min(umin, v.u);
      umax = std::max(umax, v.u);
    }
  }

  Sweep sweep;
  sweep.shape_index = shape_index;
  sweep.start_us = t0;
  sweep.speed = speed;
  sweep.direction_deg = direction_deg;
  sweep.offset = offset_frac * perp;
  sweep.start_position = pmin - umax - 1.0;
  const double travel = (pmax - umin + 1.0) - sweep.start_position;
  sweep.end_us = t0 + static_cast<Timestamp>(std::ceil(travel / speed * 1e6));

  std::vector<std::pair<double, double>> spans;
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      const double along = (x - cx) * dx + (y - cy) * dy;
      const double across = (x - cx) * nx + (y - cy) * ny - sweep.offset;
      spans.clear();
      for (const auto& poly : parts) {
        double lo = 0.0, hi = 0.0;
        if (slice(poly, across, lo, hi)) spans.emplace_back(lo, hi);
      }
      if (spans.empty()) continue;
      std::sort(spans.begin(), spans.end());
      // Merge overlapping spans and report the front (hi) of each merged
      // span: that is where the moving outline enters the pixel.
      std::size_t i = 0;
      while (i < spans.size()) {
        double hi = spans[i].second;
        std::size_t j = i + 1;
        while (j < spans.size() && spans[j].first <= hi) hi = std::max(hi, spans[j++].second);
        const double position = along - hi;
        const double t = double(t0) + (position - sweep.start_position) / speed * 1e6;
        const Timestamp ts = std::llround(t);
        if (ts >= 0 && (t_limit < 0 || ts < t_limit)) {
          out.push_back(Event{static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                              Polarity::On, ts});
        }
        i = j;
      }
    }
  }
  return sweep;
}

struct SweepDraw {
  double speed;
  double direction;
  double offset_frac;
};

SweepDraw draw_sweep(const SynthParams& p, const ShapeSpec& shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SweepDraw d;
  d.speed = p.velocity_min + (p.velocity_max - p.velocity_min) * unit(rng);
  d.direction = shape.direction_deg + p.direction_jitter_deg * (2.0 * unit(rng) - 1.0);
  d.offset_frac = p.offset_jitter * (2.0 * unit(rng) - 1.0);
  return d;
}

bool sweeps_possible(const SynthParams& p) {
  return !p.shapes.empty() && p.velocity_min > 0.0 && p.velocity_max >= p.velocity_min &&
         p.width > 0 && p.height > 0;
}

void sort_by_time(std::vector<Event>& events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });
}

}  // namespace

ShapeSpec parse_shape_spec(std::string_view text) {
  text = trim(text);
  ShapeSpec shape;
  std::string_view head = text;
  if (const auto at = text.find('@'); at != std::string_view::npos) {
    shape.direction_deg = parse_double(trim(text.substr(at + 1)), "shape direction");
    head = text.substr(0, at);
  }
  if (const auto colon = head.find(':'); colon != std::string_view::npos) {
    shape.kind = std::string(trim(head.substr(0, colon)));
    shape.size = parse_double(trim(head.substr(colon + 1)), "shape size");
  } else {
    shape.kind = std::string(trim(head));
    shape.size = default_size(shape.kind);
  }
  outline(shape, 1.0);  // validates the kind
  if (!(shape.size > 0.0)) throw ParameterError("shape size must be positive");
  return shape;
}

std::vector<ShapeSpec> parse_shape_list(std::string_view text) {
  std::vector<ShapeSpec> shapes;
  while (!trim(text).empty()) {
    const auto comma = text.find(',');
    shapes.push_back(parse_shape_spec(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return shapes;
}

std::string to_string(const ShapeSpec& shape) {
  auto num = [](double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  return shape.kind + ":" + num(shape.size) + "@" + num(shape.direction_deg);
}

EventStream synth_noise(std::uint16_t width, std::uint16_t height, Timestamp duration_us,
                        double rate_hz_per_pixel, std::uint64_t seed) {
  EventStream stream;
  stream.width = width;
  stream.height = height;
  if (duration_us <= 0 || !(rate_hz_per_pixel > 0.0)) return stream;
  std::mt19937_64 rng(splitmix64(seed ^ 0x6E6F697365ull));
  std::poisson_distribution<long> count(rate_hz_per_pixel * double(duration_us) * 1e-6);
  std::uniform_int_distribution<Timestamp> when(0, duration_us - 1);
  std::bernoulli_distribution on(0.5);
  for (std::uint16_t y = 0; y < height; ++y) {
    for (std::uint16_t x = 0; x < width; ++x) {
      const long n = count(rng);
      for (long i = 0; i < n; ++i) {
        const Timestamp t = when(rng);
        stream.events.push_back(Event{x, y, on(rng) ? Polarity::On : Polarity::Off, t});
      }
    }
  }
  sort_by_time(stream.events);
  return stream;
}

SynthOutput synth_pattern_sweeps(const SynthParams& p) {
  SynthOutput out;
  out.stream.width = p.width;
  out.stream.height = p.height;
  if (p.duration_us <= 0) return out;

  if (sweeps_possible(p)) {
    std::mt19937_64 rng(splitmix64(p.seed));
    std::vector<std::size_t> round(p.shapes.size());
    std::size_t next = round.size();
    Timestamp t0 = 0;
    while (t0 < p.duration_us) {
      if (next == round.size()) {
        for (std::size_t i = 0; i < round.size(); ++i) round[i] = i;
        std::shuffle(round.begin(), round.end(), rng);
        next = 0;
      }
      const std::size_t shape = round[next++];
      const SweepDraw d = draw_sweep(p, p.shapes[shape], rng);
      const Sweep sweep = emit_sweep(p, shape, t0, d.speed, d.direction, d.offset_frac,
                                     p.duration_us, out.stream.events);
      out.sweeps.push_back(sweep);
      t0 = sweep.end_us + std::max<Timestamp>(p.gap_us, 0);
    }
    sort_by_time(out.stream.events);
  }

  if (p.noise_rate_hz > 0.0) {
    const EventStream parts[] = {
        std::move(out.stream),
        synth_noise(p.width, p.height, p.duration_us, p.noise_rate_hz, p.seed)};
    out.stream = merge_streams(parts);
  }
  return out;
}

EventStream synth_pattern_stream(const SynthParams& params) {
  return synth_pattern_sweeps(params).stream;
}

SynthOutput synth_single_sweep(const SynthParams& p, std::size_t shape_index,
                               Timestamp lead_us) {
  if (shape_index >= p.shapes.size()) {
    throw OutOfRangeError("synth_single_sweep: shape index out of range");
  }
  if (!sweeps_possible(p)) throw ParameterError("synth_single_sweep: invalid velocity range");
  SynthOutput out;
  out.stream.width = p.width;
  out.stream.height = p.height;
  std::mt19937_64 rng(splitmix64(p.seed));
  const SweepDraw d = draw_sweep(p, p.shapes[shape_index], rng);
  const Sweep sweep = emit_sweep(p, shape_index, lead_us, d.speed, d.direction, d.offset_frac,
                                 -1, out.stream.events);
  out.sweeps.push_back(sweep);
  sort_by_time(out.stream.events);
  const Timestamp duration = sweep.end_us + lead_us;
  if (p.noise_rate_hz > 0.0) {
    const EventStream parts[] = {std::move(out.stream),
                                 synth_noise(p.width, p.height, duration, p.noise_rate_hz,
                                             p.seed)};
    out.stream = merge_streams(parts);
  }
  return out;
}

}  // namespace feast
