#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "feast/events.hpp"

namespace feast {

/// A rigid shape sweeping across the sensor. `kind` selects the outline
/// (bar, square, triangle, diamond, cross, ell, tee); `size` is its side
/// length in pixels (bar: thickness); `direction_deg` is the direction of
/// motion, 0 = +x, 90 = +y. The outline is expressed in the motion frame,
/// so a bar is always perpendicular to its motion.
struct ShapeSpec {
  std::string kind = "bar";
  double size = 4.0;
  double direction_deg = 0.0;

  friend bool operator==(const ShapeSpec&, const ShapeSpec&) = default;
};

/// Parses `kind[:size][@direction_deg]`, e.g. "bar@45", "square:10@90".
ShapeSpec parse_shape_spec(std::string_view text);
/// Comma-separated list of shape specs.
std::vector<ShapeSpec> parse_shape_list(std::string_view text);
std::string to_string(const ShapeSpec& shape);

struct SynthParams {
  std::uint16_t width = 32;
  std::uint16_t height = 32;
  std::vector<ShapeSpec> shapes;
  double velocity_min = 1000.0;  // px/s
  double velocity_max = 3000.0;  // px/s
  Timestamp duration_us = 1'000'000;
  double noise_rate_hz = 0.0;  // per pixel, both polarities together
  Timestamp gap_us = 20'000;   // quiet time between consecutive sweeps
  double direction_jitter_deg = 0.0;
  double offset_jitter = 0.0;  // perpendicular offset, fraction of the field half-size
  std::uint64_t seed = 0;
};

/// Ground truth for one pass of a shape across the field.
struct Sweep {
  std::size_t shape_index = 0;
  Timestamp start_us = 0;
  Timestamp end_us = 0;
  double speed = 0.0;          // px/s
  double direction_deg = 0.0;  // including jitter
  double offset = 0.0;         // perpendicular offset from the field centre, px
  // Position of the shape's reference point along the motion axis at
  // start_us, relative to the field centre, px.
  double start_position = 0.0;
};

struct SynthOutput {
  EventStream stream;
  std::vector<Sweep> sweeps;
};

/// Back-to-back sweeps separated by gap_us until duration_us, shapes drawn
/// in shuffled rounds so each appears equally often, plus independent
/// Poisson background noise. Only the leading edge of a shape emits (ON)
/// events. Deterministic in `seed`.
SynthOutput synth_pattern_sweeps(const SynthParams& params);
EventStream synth_pattern_stream(const SynthParams& params);

/// Exactly one sweep of shapes[shape_index], started after `lead_us` of
/// quiet, with noise over the whole recording span.
SynthOutput synth_single_sweep(const SynthParams& params, std::size_t shape_index,
                               Timestamp lead_us);

/// Background noise only.
EventStream synth_noise(std::uint16_t width, std::uint16_t height, Timestamp duration_us,
                        double rate_hz_per_pixel, std::uint64_t seed);

}  // namespace feast
