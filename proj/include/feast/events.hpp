#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace feast {

/// Microseconds since the start of a recording.
using Timestamp = std::int64_t;

enum class Polarity : std::int8_t { Off = -1, On = 1 };

/// One change-detection event from the sensor. Field order packs to 16 bytes.
struct Event {
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  Polarity p = Polarity::On;
  Timestamp t = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Time-ordered events over a fixed sensor grid.
struct EventStream {
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::vector<Event> events;

  std::size_t size() const noexcept { return events.size(); }
  bool empty() const noexcept { return events.empty(); }

  /// Timestamps non-decreasing over the whole sequence.
  bool is_time_sorted() const noexcept;
  /// Every event lies inside width x height.
  bool in_bounds() const noexcept;
  /// Last timestamp + 1, or 0 for an empty stream.
  Timestamp end_time() const noexcept;

  friend bool operator==(const EventStream&, const EventStream&) = default;
};

/// Stable time-sorted merge. On equal timestamps events keep the order of
/// the input list, then their order within each stream.
/// Throws ShapeMismatchError when sensor dimensions differ.
EventStream merge_streams(std::span<const EventStream> streams);

}  // namespace feast
